// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ENERTEST_TESTS_HELPERS_HPP
#define ENERTEST_TESTS_HELPERS_HPP

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "enertest/trace.hpp"

namespace enertest::testing {

/// Builds a segmented trace from per-stage sample values, laid out back to
/// back at the given sample period starting at t = 0.
inline trace::StagedTrace make_staged(
    const std::vector<std::pair<trace::Stage, std::vector<double>>>& stages,
    std::int64_t period_ms = 10) {
  trace::PowerTrace pt;
  pt.sample_period_ms = period_ms;
  trace::StageMarkers markers;
  std::int64_t t = 0;
  for (const auto& [stage, values] : stages) {
    markers.boundaries.push_back({t, stage});
    for (const double v : values) {
      pt.samples.push_back({t, v});
      t += period_ms;
    }
  }
  return trace::segment(std::move(pt), std::move(markers));
}

/// n copies of value.
inline std::vector<double> flat(std::size_t n, double value) {
  return std::vector<double>(n, value);
}

/// Five-stage trace with the given per-stage mean powers, constant samples.
inline trace::StagedTrace five_stage(double pre, double idle, double exe,
                                     double bg, double so,
                                     std::size_t samples_per_stage = 50) {
  return make_staged({{trace::Stage::pre_off, flat(samples_per_stage, pre)},
                      {trace::Stage::idle, flat(samples_per_stage, idle)},
                      {trace::Stage::execution, flat(samples_per_stage, exe)},
                      {trace::Stage::background, flat(samples_per_stage, bg)},
                      {trace::Stage::screen_off, flat(samples_per_stage, so)}});
}

/// Fresh scratch directory under the system temp dir.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() /
            ("enertest-" + tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace enertest::testing

#endif  // ENERTEST_TESTS_HELPERS_HPP
