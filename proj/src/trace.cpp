// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0

#include "enertest/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace enertest::trace {

std::string_view to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::pre_off: return "PRE-OFF";
    case Stage::idle: return "IDLE";
    case Stage::execution: return "EXECUTION";
    case Stage::background: return "BACKGROUND";
    case Stage::screen_off: return "SCREEN-OFF";
  }
  return "?";
}

std::optional<Stage> stage_from_string(std::string_view name) noexcept {
  for (Stage s : kStageOrder) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

void PowerTrace::validate() const {
  if (samples.empty()) {
    throw Error(Errc::invalid_argument, "power trace has no samples");
  }
  if (sample_period_ms <= 0) {
    throw Error(Errc::invalid_argument, "sample period must be positive");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].p_mw < 0.0) {
      throw Error(Errc::invalid_argument,
                  "negative power at sample " + std::to_string(i));
    }
    if (i > 0 &&
        samples[i].t_ms - samples[i - 1].t_ms != sample_period_ms) {
      throw Error(Errc::invalid_argument,
                  "non-uniform sample spacing at sample " + std::to_string(i));
    }
  }
}

void StageMarkers::validate() const {
  if (boundaries.size() != 4 && boundaries.size() != 5) {
    throw Error(Errc::order, "expected 4 or 5 stage boundaries, got " +
                                 std::to_string(boundaries.size()));
  }
  if (boundaries.front().start_ms != 0) {
    throw Error(Errc::order, "first stage must start at 0 ms");
  }
  // Labels must be the canonical order, with BACKGROUND the only one that
  // may be missing (non-background cases).
  std::size_t pos = 0;
  for (const StageMarker& m : boundaries) {
    while (pos < kStageOrder.size() && kStageOrder[pos] != m.stage) ++pos;
    if (pos == kStageOrder.size()) {
      throw Error(Errc::order, "stage labels out of canonical order");
    }
    ++pos;
  }
  if (boundaries.size() == 4 && has(Stage::background)) {
    throw Error(Errc::order,
                "four-stage traces must omit exactly the BACKGROUND stage");
  }
  for (std::size_t i = 1; i < boundaries.size(); ++i) {
    if (boundaries[i].start_ms <= boundaries[i - 1].start_ms) {
      throw Error(Errc::order, "stage starts must be strictly increasing");
    }
  }
}

bool StageMarkers::has(Stage stage) const noexcept {
  for (const StageMarker& m : boundaries) {
    if (m.stage == stage) return true;
  }
  return false;
}

bool StagedTrace::has(Stage stage) const noexcept {
  return span(stage) != nullptr;
}

const StageSpan* StagedTrace::span(Stage stage) const noexcept {
  for (const StageSpan& s : spans) {
    if (s.stage == stage) return &s;
  }
  return nullptr;
}

void ChppConfig::validate() const {
  if (power_threshold_mw <= 0.0 || min_duration_ms <= 0) {
    throw Error(Errc::invalid_argument,
                "CHPP threshold and minimum duration must be positive");
  }
}

StagedTrace segment(PowerTrace trace, StageMarkers markers) {
  trace.validate();
  markers.validate();

  const std::int64_t last_ms = trace.samples.back().t_ms;
  for (const StageMarker& m : markers.boundaries) {
    if (m.start_ms < 0 || m.start_ms > last_ms) {
      throw Error(Errc::bounds,
                  "stage boundary at " + std::to_string(m.start_ms) +
                      " ms lies outside the trace (last sample " +
                      std::to_string(last_ms) + " ms)");
    }
  }

  StagedTrace staged{std::move(trace), std::move(markers), {}};
  const auto& samples = staged.trace.samples;
  auto index_of = [&](std::int64_t start_ms) {
    auto it = std::lower_bound(
        samples.begin(), samples.end(), start_ms,
        [](const Sample& s, std::int64_t t) { return s.t_ms < t; });
    return static_cast<std::size_t>(it - samples.begin());
  };

  const auto& bounds = staged.markers.boundaries;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    StageSpan span;
    span.stage = bounds[i].stage;
    span.begin = index_of(bounds[i].start_ms);
    span.end = (i + 1 < bounds.size()) ? index_of(bounds[i + 1].start_ms)
                                       : samples.size();
    if (span.end - span.begin < kMinStageSamples) {
      throw Error(Errc::bounds,
                  std::string("stage ") + std::string(to_string(span.stage)) +
                      " has fewer than " + std::to_string(kMinStageSamples) +
                      " samples");
    }
    staged.spans.push_back(span);
  }
  return staged;
}

namespace {

const StageSpan& require_span(const StagedTrace& staged, Stage stage) {
  const StageSpan* s = staged.span(stage);
  if (s == nullptr) {
    throw Error(Errc::stage_missing, std::string("stage ") +
                                         std::string(to_string(stage)) +
                                         " not present in trace");
  }
  return *s;
}

}  // namespace

double mean_power(const StagedTrace& staged, Stage stage) {
  const StageSpan& span = require_span(staged, stage);
  double sum = 0.0;
  for (std::size_t i = span.begin; i < span.end; ++i) {
    sum += staged.trace.samples[i].p_mw;
  }
  return sum / static_cast<double>(span.end - span.begin);
}

std::vector<ChppPeriod> find_chpp(const StagedTrace& staged,
                                  const ChppConfig& cfg) {
  cfg.validate();
  const StageSpan& span = require_span(staged, Stage::execution);
  const auto& samples = staged.trace.samples;
  const std::int64_t period = staged.trace.sample_period_ms;

  std::vector<ChppPeriod> out;
  std::size_t run_begin = span.begin;
  bool in_run = false;
  auto close_run = [&](std::size_t run_end) {
    const std::int64_t len =
        static_cast<std::int64_t>(run_end - run_begin) * period;
    if (len >= cfg.min_duration_ms) {
      out.push_back({samples[run_begin].t_ms, samples[run_begin].t_ms + len});
    }
  };
  for (std::size_t i = span.begin; i < span.end; ++i) {
    const bool high = samples[i].p_mw > cfg.power_threshold_mw;
    if (high && !in_run) {
      run_begin = i;
      in_run = true;
    } else if (!high && in_run) {
      close_run(i);
      in_run = false;
    }
  }
  if (in_run) close_run(span.end);
  return out;
}

FeatureVector features(const StagedTrace& staged, const ChppConfig& cfg) {
  const std::vector<ChppPeriod> periods = find_chpp(staged, cfg);
  const StageSpan& span = require_span(staged, Stage::execution);
  const auto& samples = staged.trace.samples;

  FeatureVector fv;
  fv.mu_exe_mw = mean_power(staged, Stage::execution);
  fv.n_chpp = static_cast<int>(periods.size());

  double chpp_sum = 0.0;
  std::size_t chpp_count = 0;
  for (const ChppPeriod& p : periods) {
    fv.l_chpp_ms += static_cast<double>(p.end_ms - p.start_ms);
    for (std::size_t i = span.begin; i < span.end; ++i) {
      if (samples[i].t_ms >= p.start_ms && samples[i].t_ms < p.end_ms) {
        chpp_sum += samples[i].p_mw;
        ++chpp_count;
      }
    }
  }
  fv.mu_chpp_mw =
      chpp_count == 0 ? 0.0 : chpp_sum / static_cast<double>(chpp_count);
  return fv;
}

double dissimilarity(double e_a_mw, double e_b_mw) {
  if (e_b_mw <= 0.0) {
    throw Error(Errc::degenerate_baseline,
                "baseline mean power must be positive");
  }
  return std::max(0.0, (e_a_mw - e_b_mw) / e_b_mw);
}

double dissimilarity(const StagedTrace& staged, Stage suspect,
                     Stage baseline) {
  return dissimilarity(mean_power(staged, suspect),
                       mean_power(staged, baseline));
}

double energy_waste(double e_x_mw, double e_n_mw) {
  if (e_n_mw <= 0.0) {
    throw Error(Errc::degenerate_baseline,
                "normal energy cost must be positive");
  }
  return (e_x_mw / e_n_mw - 1.0) * 100.0;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) {
    throw Error(Errc::invalid_argument, "unformattable double");
  }
  return std::string(buf, ptr);
}

void write_trace(const StagedTrace& staged, std::ostream& out) {
  for (const StageMarker& m : staged.markers.boundaries) {
    out << "# stage " << to_string(m.stage) << ' ' << m.start_ms << '\n';
  }
  for (const Sample& s : staged.trace.samples) {
    out << s.t_ms << ',' << format_double(s.p_mw) << '\n';
  }
}

void write_trace_file(const StagedTrace& staged,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  }
  write_trace(staged, out);
  out.flush();
  if (!out) {
    throw Error(Errc::io, "failed writing " + path.string());
  }
}

namespace {

double parse_double(std::string_view text, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(Errc::parse, "bad power value on line " +
                                 std::to_string(line_no) + ": '" +
                                 std::string(text) + "'");
  }
  return value;
}

std::int64_t parse_int(std::string_view text, std::size_t line_no) {
  std::int64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(Errc::parse, "bad integer on line " + std::to_string(line_no) +
                                 ": '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

StagedTrace read_trace(std::istream& in) {
  PowerTrace trace;
  StageMarkers markers;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream hdr(line);
      std::string hash, keyword, label;
      std::int64_t start_ms = 0;
      hdr >> hash >> keyword >> label >> start_ms;
      if (hdr.fail() || keyword != "stage") {
        throw Error(Errc::parse,
                    "bad header on line " + std::to_string(line_no));
      }
      const auto stage = stage_from_string(label);
      if (!stage) {
        throw Error(Errc::parse, "unknown stage label '" + label +
                                     "' on line " + std::to_string(line_no));
      }
      markers.boundaries.push_back({start_ms, *stage});
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(Errc::parse,
                  "expected 'timestamp_ms,power_mw' on line " +
                      std::to_string(line_no));
    }
    Sample s;
    s.t_ms = parse_int(std::string_view(line).substr(0, comma), line_no);
    s.p_mw = parse_double(std::string_view(line).substr(comma + 1), line_no);
    trace.samples.push_back(s);
  }
  if (trace.samples.size() >= 2) {
    trace.sample_period_ms = trace.samples[1].t_ms - trace.samples[0].t_ms;
  }
  return segment(std::move(trace), std::move(markers));
}

StagedTrace read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::io, "cannot open " + path.string());
  }
  return read_trace(in);
}

}  // namespace enertest::trace
