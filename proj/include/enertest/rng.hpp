// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ENERTEST_RNG_HPP
#define ENERTEST_RNG_HPP

#include <cmath>
#include <cstdint>

namespace enertest {

/// SplitMix64 finalizer. Pure integer arithmetic, identical output on every
/// platform.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Deterministic stream generator used for every random draw in the project.
///
/// Recurrence (the normative definition; any reimplementation must agree
/// bit-exactly):
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   output = z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    // multiply-shift; bias is < 2^-64 per draw
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  /// Uniform double in [lo, hi).
  double next_range(double lo, double hi) noexcept {
    return lo + (hi - lo) * next_unit();
  }

  /// Box-Muller normal deviate; consumes two uniforms per pair.
  double next_gaussian(double mean, double sd) noexcept {
    if (have_spare_) {
      have_spare_ = false;
      return mean + sd * spare_;
    }
    double u1 = 0.0;
    do {
      u1 = next_unit();
    } while (u1 <= 0.0);
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return mean + sd * r * std::cos(theta);
  }

  /// Knuth-style Poisson deviate (small lambda only).
  int next_poisson(double lambda) noexcept {
    const double limit = std::exp(-lambda);
    int k = 0;
    double prod = 1.0;
    for (;;) {
      prod *= next_unit();
      if (prod <= limit) return k;
      ++k;
    }
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Stable derivation of a child seed from (base seed, index), used to give
/// every test case and every generated app its own independent stream.
constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::uint64_t index) noexcept {
  return mix64(base + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

}  // namespace enertest

#endif  // ENERTEST_RNG_HPP
