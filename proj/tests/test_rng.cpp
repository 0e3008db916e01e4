// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "doctest.h"
#include "enertest/rng.hpp"

using namespace enertest;

TEST_CASE("SplitMix64 reproduces the canonical stream") {
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
  CHECK(rng.next() == 0x06C45D188009454FULL);
  CHECK(rng.next() == 0xF88BB8A8724C81ECULL);

  SplitMix64 rng42(42);
  CHECK(rng42.next() == 0xBDD732262FEB6E95ULL);
  CHECK(rng42.next() == 0x28EFE333B266F103ULL);
}

TEST_CASE("streams with the same seed agree, different seeds diverge") {
  SplitMix64 a(1234);
  SplitMix64 b(1234);
  SplitMix64 c(1235);
  bool all_equal = true;
  bool any_diff_c = false;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next();
    all_equal = all_equal && va == b.next();
    any_diff_c = any_diff_c || va != c.next();
  }
  CHECK(all_equal);
  CHECK(any_diff_c);
}

TEST_CASE("next_unit lies in [0, 1) and is roughly uniform") {
  SplitMix64 rng(7);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.next_unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000.0 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("next_below respects the bound and hits all residues") {
  SplitMix64 rng(9);
  std::vector<int> counts(10, 0);
  for (int i = 0; i < 20000; ++i) {
    const auto v = rng.next_below(10);
    REQUIRE(v < 10);
    ++counts[static_cast<std::size_t>(v)];
  }
  for (const int c : counts) {
    CHECK(c > 1600);  // expectation 2000, generous slack
    CHECK(c < 2400);
  }
  CHECK(rng.next_below(1) == 0);
}

TEST_CASE("next_range stays in its interval") {
  SplitMix64 rng(11);
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.next_range(-3.5, 8.25);
    REQUIRE(v >= -3.5);
    REQUIRE(v < 8.25);
  }
}

TEST_CASE("next_gaussian has the requested moments") {
  SplitMix64 rng(13);
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = rng.next_gaussian(50.0, 12.0);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(mean == doctest::Approx(50.0).epsilon(0.005));
  CHECK(std::sqrt(var) == doctest::Approx(12.0).epsilon(0.02));
}

TEST_CASE("next_poisson has mean lambda") {
  SplitMix64 rng(17);
  const int n = 50000;
  std::int64_t total = 0;
  for (int i = 0; i < n; ++i) {
    const int k = rng.next_poisson(3.0);
    REQUIRE(k >= 0);
    total += k;
  }
  CHECK(static_cast<double>(total) / n == doctest::Approx(3.0).epsilon(0.03));
}

TEST_CASE("derive_seed separates child streams") {
  CHECK(derive_seed(0, 0) == 0xE220A8397B1DCDAFULL);
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    seen.insert(derive_seed(99, i));
  }
  CHECK(seen.size() == 1000);
  // Child streams from adjacent indices do not collide in their prefix.
  SplitMix64 a(derive_seed(5, 1));
  SplitMix64 b(derive_seed(5, 2));
  bool differs = false;
  for (int i = 0; i < 16; ++i) differs = differs || a.next() != b.next();
  CHECK(differs);
}
