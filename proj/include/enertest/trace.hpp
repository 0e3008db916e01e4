// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0
//
// Power traces and their five-stage structure. A test case produces one
// trace covering the stages PRE-OFF, IDLE, EXECUTION, BACKGROUND and
// SCREEN-OFF (BACKGROUND is absent for non-background cases). All issue
// detection works off per-stage statistics and continuous-high-power
// periods (CHPPs) extracted here.

#ifndef ENERTEST_TRACE_HPP
#define ENERTEST_TRACE_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "enertest/error.hpp"

namespace enertest::trace {

enum class Stage {
  pre_off,
  idle,
  execution,
  background,
  screen_off,
};

inline constexpr std::array<Stage, 5> kStageOrder = {
    Stage::pre_off, Stage::idle, Stage::execution, Stage::background,
    Stage::screen_off};

std::string_view to_string(Stage stage) noexcept;
std::optional<Stage> stage_from_string(std::string_view name) noexcept;

/// One power sample: milliseconds since case start, instantaneous milliwatts.
struct Sample {
  std::int64_t t_ms = 0;
  double p_mw = 0.0;
};

/// Uniformly sampled, nonnegative power signal.
///
/// Invariants: nonempty, timestamps strictly increasing with uniform spacing
/// equal to sample_period_ms, all powers >= 0. validate() enforces them.
struct PowerTrace {
  std::vector<Sample> samples;
  std::int64_t sample_period_ms = 10;  // 100 Hz default

  void validate() const;
};

/// Stage boundary: the stage begins at start_ms and runs until the next
/// boundary (or the end of the trace).
struct StageMarker {
  std::int64_t start_ms = 0;
  Stage stage = Stage::pre_off;
};

/// Ordered stage boundaries. Either all five stages or, for non-background
/// cases, the four stages without BACKGROUND. First start must be 0 and
/// starts must be strictly increasing; anything else is an order error.
struct StageMarkers {
  std::vector<StageMarker> boundaries;

  void validate() const;
  bool has(Stage stage) const noexcept;
};

/// Contiguous sample range [begin, end) belonging to one stage.
struct StageSpan {
  Stage stage = Stage::pre_off;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// A power trace partitioned into stages. Construct through segment(); the
/// spans cover every sample exactly once and each stage holds at least
/// kMinStageSamples samples.
struct StagedTrace {
  PowerTrace trace;
  StageMarkers markers;
  std::vector<StageSpan> spans;

  bool has(Stage stage) const noexcept;
  const StageSpan* span(Stage stage) const noexcept;
};

inline constexpr std::size_t kMinStageSamples = 10;

/// CHPP extraction parameters: a period qualifies when power stays strictly
/// above power_threshold_mw for at least min_duration_ms.
struct ChppConfig {
  double power_threshold_mw = 0.0;
  std::int64_t min_duration_ms = 2000;

  void validate() const;
};

/// Half-open CHPP interval; length is end_ms - start_ms.
struct ChppPeriod {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
};

/// Clustering features of one test case, all taken from the EXECUTION stage:
/// total CHPP length, CHPP count, mean power inside CHPPs (0 when there are
/// none) and mean power of the whole stage.
struct FeatureVector {
  double l_chpp_ms = 0.0;
  int n_chpp = 0;
  double mu_chpp_mw = 0.0;
  double mu_exe_mw = 0.0;

  std::array<double, 4> as_array() const noexcept {
    return {l_chpp_ms, static_cast<double>(n_chpp), mu_chpp_mw, mu_exe_mw};
  }
};

/// Partitions trace samples by the given markers.
/// Throws Errc::bounds when a marker lies outside the trace extent or a
/// stage ends up with fewer than kMinStageSamples samples, Errc::order when
/// markers are out of canonical order.
StagedTrace segment(PowerTrace trace, StageMarkers markers);

/// Arithmetic mean power of one stage. Throws Errc::stage_missing when the
/// stage is not part of the trace.
double mean_power(const StagedTrace& staged, Stage stage);

/// Maximal runs of consecutive EXECUTION samples with power strictly above
/// the threshold, kept when their duration reaches min_duration_ms.
/// Disjoint and ordered by start. A run of k samples covers k sample
/// periods.
std::vector<ChppPeriod> find_chpp(const StagedTrace& staged,
                                  const ChppConfig& cfg);

/// CHPP features plus the EXECUTION mean. mu_chpp is 0 by convention when no
/// period qualifies.
FeatureVector features(const StagedTrace& staged, const ChppConfig& cfg);

/// One-sided relative increase of a suspect mean over a baseline mean:
/// max(0, (e_a - e_b) / e_b). A suspect cheaper than the baseline yields 0.
/// Throws Errc::degenerate_baseline when the baseline is not positive.
double dissimilarity(double e_a_mw, double e_b_mw);

/// Same, over the mean powers of two stages of one trace.
double dissimilarity(const StagedTrace& staged, Stage suspect, Stage baseline);

/// Energy waste of an issue in percent: (e_x / e_n - 1) * 100.
/// e_x is the suspect stage's mean power, e_n the matching normal baseline.
/// Throws Errc::degenerate_baseline when e_n <= 0.
double energy_waste(double e_x_mw, double e_n_mw);

// --- trace file format ------------------------------------------------------
//
// UTF-8 text. One `# stage <label> <start_ms>` line per stage boundary, in
// order, followed by one `timestamp_ms,power_mw` line per sample. Doubles
// are written in shortest round-trip form, so write-then-read is lossless.

void write_trace(const StagedTrace& staged, std::ostream& out);
void write_trace_file(const StagedTrace& staged,
                      const std::filesystem::path& path);
StagedTrace read_trace(std::istream& in);
StagedTrace read_trace_file(const std::filesystem::path& path);

/// Shortest round-trip decimal form of a double (no locale involvement).
std::string format_double(double value);

}  // namespace enertest::trace

#endif  // ENERTEST_TRACE_HPP
