// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0
//
// Device and app simulation. A simulated test case runs one app under one
// input sequence and one running context and yields a staged power trace.
// Apps carry injected defects with trigger predicates, so every trace comes
// with ground truth for scoring the detector.

#ifndef ENERTEST_SIM_HPP
#define ENERTEST_SIM_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "enertest/efg.hpp"
#include "enertest/error.hpp"
#include "enertest/trace.hpp"

namespace enertest::sim {

enum class ContextKind { normal, network_fail, flight_mode, non_background };

inline constexpr std::array<ContextKind, 4> kContextOrder = {
    ContextKind::normal, ContextKind::network_fail, ContextKind::flight_mode,
    ContextKind::non_background};

std::string_view to_string(ContextKind kind) noexcept;
std::optional<ContextKind> context_from_string(std::string_view name) noexcept;

/// Environmental configuration of a test case. Network parameters describe
/// the context (and go into reports); they do not themselves change power.
/// Power only moves when a defect's trigger matches the context.
struct RunningContext {
  ContextKind kind = ContextKind::normal;
  std::optional<double> delay_ms;        // empty when the network is off
  std::optional<double> bandwidth_kbps;  // empty when the network is off
  bool gps_enabled = true;
  bool has_background_stage = true;

  /// The four canonical contexts: Normal 36 ms / 3.2 Mb/s, NetworkFail
  /// 451 ms / 12.0 Kb/s, FlightMode with the radio off and GPS on, and
  /// NonBackground with normal network but no BACKGROUND stage.
  static RunningContext make(ContextKind kind) noexcept;
};

enum class DefectKind {
  unnecessary_workload,
  excessively_frequent_ops,
  background,
  no_sleep,
};

std::string_view to_string(DefectKind kind) noexcept;
std::optional<DefectKind> defect_kind_from_string(std::string_view name) noexcept;

/// The stage a defect inflates: EXECUTION for the two workload kinds,
/// BACKGROUND and SCREEN-OFF for the other two.
trace::Stage affected_stage(DefectKind kind) noexcept;

/// Conjunction of optional conditions; a defect fires when all present
/// conditions hold (an empty trigger always fires) and the affected stage
/// exists in the context. The node condition requires a weighted sequence
/// whose path visits the node.
struct Trigger {
  std::optional<ContextKind> context;
  std::optional<std::string> node;
  std::optional<efg::InputKind> input;
};

bool trigger_holds(const Trigger& trigger, const efg::SequenceDescriptor& seq,
                   const RunningContext& ctx) noexcept;

/// An injected energy defect. magnitude is the relative mean-power increase
/// of the affected stage (0.25 = +25%). A sticky defect additionally leaves
/// residual power behind that contaminates later cases until reset().
struct DefectSpec {
  DefectKind kind = DefectKind::unnecessary_workload;
  Trigger trigger;
  double magnitude = 0.25;
  bool sticky = false;
};

/// A simulated subject app.
struct AppModel {
  std::string name;
  std::string category;
  efg::EventFlowGraph efg;
  std::array<double, 5> baseline_mw;  // indexed by trace::kStageOrder
  std::vector<DefectSpec> defects;
  double noise_sd_mw = 30.0;

  void validate() const;
};

/// Defects of the app whose triggers hold for (sequence, context) and whose
/// affected stage exists in the context.
std::vector<DefectSpec> triggered_defects(const AppModel& app,
                                          const efg::SequenceDescriptor& seq,
                                          const RunningContext& ctx);

/// Rare OS-activity power excursions layered onto the EXECUTION stage, used
/// to exercise false-positive behavior. Disabled by default.
struct OsNoise {
  bool enabled = false;
  double events_per_minute = 2.0;
  double min_amplitude_mw = 200.0;
  double max_amplitude_mw = 800.0;
  std::int64_t min_duration_ms = 100;
  std::int64_t max_duration_ms = 1000;
};

struct SimParams {
  std::array<std::int64_t, 5> stage_duration_ms = {10000, 10000, 60000, 30000,
                                                   30000};
  std::int64_t sample_period_ms = 10;  // 100 Hz
  // ExcessivelyFrequentOps burst shape: square wave, scaled so the stage
  // mean still satisfies the multiplicative defect composition.
  std::int64_t efo_period_ms = 8000;
  double efo_duty = 0.5;
  OsNoise os_noise;

  void validate() const;
};

/// One executed test case with its trace and ground truth.
struct TestCase {
  std::string app;
  efg::SequenceDescriptor sequence;
  RunningContext context;
  std::uint64_t rng_seed = 0;
  trace::StagedTrace staged;
  std::vector<DefectSpec> triggered;
};

/// Trace synthesis. All randomness comes from the per-case seed, so a case
/// is a pure function of (app, sequence, context, seed) on a freshly reset
/// simulator. Only sticky defects leave state behind; reset() clears it.
class Simulator {
 public:
  explicit Simulator(SimParams params);

  TestCase run_case(const AppModel& app, const efg::SequenceDescriptor& seq,
                    const RunningContext& ctx, std::uint64_t seed);
  void reset() noexcept;

  const SimParams& params() const noexcept { return params_; }

 private:
  SimParams params_;
  std::array<double, 5> residual_mw_{};
};

/// Reproducible corpus of simulated apps.
struct MagnitudeRange {
  double min = 0.25;
  double max = 0.5;
};

struct FleetConfig {
  int n_apps = 20;
  std::vector<std::string> categories = {"productivity", "media", "navigation",
                                         "games"};
  double defect_prevalence = 0.3;
  std::uint64_t seed = 1;
  std::array<double, 5> baseline_mw = {300.0, 1000.0, 1500.0, 1000.0, 300.0};
  double noise_sd_mw = 30.0;
  MagnitudeRange execution_magnitude = {0.25, 1.376};
  MagnitudeRange background_magnitude = {0.45, 1.962};
  MagnitudeRange nosleep_magnitude = {0.60, 6.633};
  /// When set, every generated defect triggers only under this context.
  /// Otherwise workload defects rotate over NetworkFail/FlightMode triggers
  /// and background/no-sleep defects trigger unconditionally.
  std::optional<ContextKind> pin_trigger_context;
  int efg_min_nodes = 4;
  int efg_max_nodes = 8;

  void validate() const;
};

std::vector<AppModel> generate_fleet(const FleetConfig& cfg);

// --- fleet spec file --------------------------------------------------------
//
// JSON with either a "generator" object holding FleetConfig fields or an
// explicit "apps" array (name, category, efg file path, baseline_mw,
// noise_sd_mw, defects with kind/magnitude/trigger). Relative EFG paths are
// resolved against the spec file's directory.

std::vector<AppModel> load_fleet_file(const std::filesystem::path& path);
FleetConfig fleet_config_from_json_text(const std::string& text);

}  // namespace enertest::sim

#endif  // ENERTEST_SIM_HPP
