// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0

#include "enertest/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "enertest/rng.hpp"
#include "json_util.hpp"

namespace enertest::sim {

std::string_view to_string(ContextKind kind) noexcept {
  switch (kind) {
    case ContextKind::normal: return "normal";
    case ContextKind::network_fail: return "network_fail";
    case ContextKind::flight_mode: return "flight_mode";
    case ContextKind::non_background: return "non_background";
  }
  return "?";
}

std::optional<ContextKind> context_from_string(std::string_view name) noexcept {
  for (ContextKind k : kContextOrder) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

RunningContext RunningContext::make(ContextKind kind) noexcept {
  RunningContext ctx;
  ctx.kind = kind;
  switch (kind) {
    case ContextKind::normal:
      ctx.delay_ms = 36.0;
      ctx.bandwidth_kbps = 3200.0;
      break;
    case ContextKind::network_fail:
      ctx.delay_ms = 451.0;
      ctx.bandwidth_kbps = 12.0;
      break;
    case ContextKind::flight_mode:
      ctx.delay_ms = std::nullopt;
      ctx.bandwidth_kbps = std::nullopt;
      break;
    case ContextKind::non_background:
      ctx.delay_ms = 36.0;
      ctx.bandwidth_kbps = 3200.0;
      ctx.has_background_stage = false;
      break;
  }
  return ctx;
}

std::string_view to_string(DefectKind kind) noexcept {
  switch (kind) {
    case DefectKind::unnecessary_workload: return "unnecessary_workload";
    case DefectKind::excessively_frequent_ops:
      return "excessively_frequent_ops";
    case DefectKind::background: return "background";
    case DefectKind::no_sleep: return "no_sleep";
  }
  return "?";
}

std::optional<DefectKind> defect_kind_from_string(
    std::string_view name) noexcept {
  for (DefectKind k :
       {DefectKind::unnecessary_workload, DefectKind::excessively_frequent_ops,
        DefectKind::background, DefectKind::no_sleep}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

trace::Stage affected_stage(DefectKind kind) noexcept {
  switch (kind) {
    case DefectKind::unnecessary_workload:
    case DefectKind::excessively_frequent_ops:
      return trace::Stage::execution;
    case DefectKind::background: return trace::Stage::background;
    case DefectKind::no_sleep: return trace::Stage::screen_off;
  }
  return trace::Stage::execution;
}

bool trigger_holds(const Trigger& trigger, const efg::SequenceDescriptor& seq,
                   const RunningContext& ctx) noexcept {
  if (trigger.context && *trigger.context != ctx.kind) return false;
  if (trigger.input && *trigger.input != seq.kind) return false;
  if (trigger.node) {
    if (seq.kind != efg::InputKind::weighted) return false;
    if (std::find(seq.path.begin(), seq.path.end(), *trigger.node) ==
        seq.path.end()) {
      return false;
    }
  }
  return true;
}

void AppModel::validate() const {
  if (name.empty()) {
    throw Error(Errc::config, "app needs a name");
  }
  for (double b : baseline_mw) {
    if (!(b > 0.0)) {
      throw Error(Errc::config, name + ": baselines must be positive");
    }
  }
  if (!(baseline_mw[0] < baseline_mw[1])) {
    throw Error(Errc::config,
                name + ": PRE-OFF baseline must stay below IDLE baseline");
  }
  if (noise_sd_mw < 0.0) {
    throw Error(Errc::config, name + ": noise sd must be nonnegative");
  }
  for (const DefectSpec& d : defects) {
    if (!(d.magnitude > 0.0)) {
      throw Error(Errc::config, name + ": defect magnitude must be positive");
    }
  }
}

std::vector<DefectSpec> triggered_defects(const AppModel& app,
                                          const efg::SequenceDescriptor& seq,
                                          const RunningContext& ctx) {
  std::vector<DefectSpec> out;
  for (const DefectSpec& d : app.defects) {
    if (affected_stage(d.kind) == trace::Stage::background &&
        !ctx.has_background_stage) {
      continue;  // nothing to inflate, so the defect does not fire
    }
    if (trigger_holds(d.trigger, seq, ctx)) out.push_back(d);
  }
  return out;
}

void SimParams::validate() const {
  if (sample_period_ms <= 0) {
    throw Error(Errc::config, "sample period must be positive");
  }
  for (std::int64_t d : stage_duration_ms) {
    if (d < static_cast<std::int64_t>(trace::kMinStageSamples) *
                sample_period_ms) {
      throw Error(Errc::config, "stage durations must cover at least " +
                                    std::to_string(trace::kMinStageSamples) +
                                    " samples");
    }
  }
  if (efo_period_ms < 2 * sample_period_ms || !(efo_duty > 0.0) ||
      !(efo_duty < 1.0)) {
    throw Error(Errc::config, "invalid burst shape parameters");
  }
  if (os_noise.enabled) {
    const bool ok = os_noise.events_per_minute > 0.0 &&
                    os_noise.min_amplitude_mw > 0.0 &&
                    os_noise.min_amplitude_mw <= os_noise.max_amplitude_mw &&
                    os_noise.min_duration_ms >= 1 &&
                    os_noise.min_duration_ms <= os_noise.max_duration_ms;
    if (!ok) {
      throw Error(Errc::config, "invalid OS noise parameters");
    }
  }
}

Simulator::Simulator(SimParams params) : params_(std::move(params)) {
  params_.validate();
}

void Simulator::reset() noexcept { residual_mw_.fill(0.0); }

TestCase Simulator::run_case(const AppModel& app,
                             const efg::SequenceDescriptor& seq,
                             const RunningContext& ctx, std::uint64_t seed) {
  app.validate();
  if (seq.kind == efg::InputKind::weighted) {
    efg::path_stats(app.efg, seq.path);  // throws Errc::path on a bad walk
  } else if (seq.length < 1) {
    throw Error(Errc::invalid_argument, "random sequence needs length >= 1");
  }

  TestCase result;
  result.app = app.name;
  result.sequence = seq;
  result.context = ctx;
  result.rng_seed = seed;
  result.triggered = triggered_defects(app, seq, ctx);

  std::vector<trace::Stage> stages;
  for (trace::Stage s : trace::kStageOrder) {
    if (s == trace::Stage::background && !ctx.has_background_stage) continue;
    stages.push_back(s);
  }

  SplitMix64 rng(seed);
  trace::PowerTrace power;
  power.sample_period_ms = params_.sample_period_ms;
  trace::StageMarkers markers;
  std::int64_t t_ms = 0;

  for (trace::Stage stage : stages) {
    const auto stage_idx = static_cast<std::size_t>(stage);
    const std::int64_t duration = params_.stage_duration_ms[stage_idx];
    const std::int64_t n = duration / params_.sample_period_ms;
    markers.boundaries.push_back({t_ms, stage});

    double flat_mult = 1.0;
    double target_mult = 1.0;
    bool bursty = false;
    for (const DefectSpec& d : result.triggered) {
      if (affected_stage(d.kind) != stage) continue;
      target_mult *= 1.0 + d.magnitude;
      if (d.kind == DefectKind::excessively_frequent_ops) {
        bursty = true;
      } else {
        flat_mult *= 1.0 + d.magnitude;
      }
    }
    const double base = app.baseline_mw[stage_idx];
    const double level = base * flat_mult + residual_mw_[stage_idx];

    // Burst pattern: sample k is in the on phase of the square wave. The
    // on-phase add is scaled by the actual on-sample count so the stage mean
    // lands exactly on base * target_mult despite partial periods.
    const std::int64_t on_window =
        static_cast<std::int64_t>(params_.efo_duty *
                                  static_cast<double>(params_.efo_period_ms));
    std::int64_t n_on = 0;
    if (bursty) {
      for (std::int64_t k = 0; k < n; ++k) {
        if ((k * params_.sample_period_ms) % params_.efo_period_ms < on_window)
          ++n_on;
      }
    }
    const double burst_add =
        bursty ? base * (target_mult - flat_mult) * static_cast<double>(n) /
                     static_cast<double>(n_on)
               : 0.0;

    struct Excursion {
      std::int64_t start_ms, end_ms;
      double amp_mw;
    };
    std::vector<Excursion> excursions;
    if (params_.os_noise.enabled && stage == trace::Stage::execution) {
      const OsNoise& os = params_.os_noise;
      const double lambda =
          os.events_per_minute * static_cast<double>(duration) / 60000.0;
      const int count = rng.next_poisson(lambda);
      for (int e = 0; e < count; ++e) {
        Excursion ex;
        ex.start_ms = static_cast<std::int64_t>(
            rng.next_below(static_cast<std::uint64_t>(duration)));
        ex.end_ms = ex.start_ms + os.min_duration_ms +
                    static_cast<std::int64_t>(rng.next_below(
                        static_cast<std::uint64_t>(os.max_duration_ms -
                                                   os.min_duration_ms + 1)));
        ex.amp_mw = rng.next_range(os.min_amplitude_mw, os.max_amplitude_mw);
        excursions.push_back(ex);
      }
    }

    for (std::int64_t k = 0; k < n; ++k) {
      const std::int64_t rel_ms = k * params_.sample_period_ms;
      double p = level;
      if (bursty && rel_ms % params_.efo_period_ms < on_window) {
        p += burst_add;
      }
      for (const Excursion& ex : excursions) {
        if (rel_ms >= ex.start_ms && rel_ms < ex.end_ms) p += ex.amp_mw;
      }
      if (app.noise_sd_mw > 0.0) {
        p += rng.next_gaussian(0.0, app.noise_sd_mw);
      }
      power.samples.push_back({t_ms + rel_ms, std::max(0.0, p)});
    }
    t_ms += duration;
  }

  for (const DefectSpec& d : result.triggered) {
    if (d.sticky) {
      const auto idx = static_cast<std::size_t>(affected_stage(d.kind));
      residual_mw_[idx] = app.baseline_mw[idx] * d.magnitude * 0.5;
    }
  }

  result.staged = trace::segment(std::move(power), std::move(markers));
  return result;
}

void FleetConfig::validate() const {
  if (n_apps < 1) {
    throw Error(Errc::config, "fleet needs at least one app");
  }
  if (categories.empty()) {
    throw Error(Errc::config, "fleet needs at least one category");
  }
  if (defect_prevalence < 0.0 || defect_prevalence > 1.0) {
    throw Error(Errc::config, "defect prevalence must lie in [0, 1]");
  }
  for (double b : baseline_mw) {
    if (!(b > 0.0)) {
      throw Error(Errc::config, "fleet baselines must be positive");
    }
  }
  if (!(baseline_mw[0] < baseline_mw[1])) {
    throw Error(Errc::config, "PRE-OFF baseline must stay below IDLE");
  }
  if (noise_sd_mw < 0.0) {
    throw Error(Errc::config, "noise sd must be nonnegative");
  }
  for (const MagnitudeRange& r :
       {execution_magnitude, background_magnitude, nosleep_magnitude}) {
    if (!(r.min > 0.0) || r.min > r.max) {
      throw Error(Errc::config, "invalid defect magnitude range");
    }
  }
  if (efg_min_nodes < 1 || efg_min_nodes > efg_max_nodes) {
    throw Error(Errc::config, "invalid EFG node count range");
  }
}

namespace {

std::string zero_padded(int value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

efg::EventFlowGraph generate_efg(SplitMix64& rng, int min_nodes,
                                 int max_nodes) {
  const int nn = min_nodes + static_cast<int>(rng.next_below(
                                 static_cast<std::uint64_t>(max_nodes -
                                                            min_nodes + 1)));
  std::vector<std::string> nodes;
  for (int i = 0; i < nn; ++i) nodes.push_back("n" + std::to_string(i));

  std::vector<efg::Edge> edges;
  std::set<std::pair<int, int>> seen;
  auto add_edge = [&](int from, int to) {
    if (!seen.emplace(from, to).second) return;
    efg::Edge e;
    e.from = nodes[static_cast<std::size_t>(from)];
    e.to = nodes[static_cast<std::size_t>(to)];
    e.s = static_cast<std::int64_t>(rng.next_below(6));
    e.c = static_cast<std::int64_t>(rng.next_below(21));
    edges.push_back(std::move(e));
  };
  for (int i = 0; i + 1 < nn; ++i) add_edge(i, i + 1);  // reachability spine
  for (int i = 0; i < nn; ++i) {
    add_edge(static_cast<int>(rng.next_below(static_cast<std::uint64_t>(nn))),
             static_cast<int>(rng.next_below(static_cast<std::uint64_t>(nn))));
  }
  std::string root = nodes.front();
  return efg::EventFlowGraph(std::move(root), std::move(nodes),
                             std::move(edges));
}

}  // namespace

std::vector<AppModel> generate_fleet(const FleetConfig& cfg) {
  cfg.validate();
  SplitMix64 fleet_rng(cfg.seed);

  std::vector<int> order(static_cast<std::size_t>(cfg.n_apps));
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(fleet_rng.next_below(i));
    std::swap(order[i - 1], order[j]);
  }
  const auto defective_count = static_cast<std::size_t>(
      std::llround(cfg.defect_prevalence * static_cast<double>(cfg.n_apps)));
  std::vector<int> defective(order.begin(),
                             order.begin() +
                                 static_cast<std::ptrdiff_t>(defective_count));
  std::sort(defective.begin(), defective.end());

  constexpr std::array<DefectKind, 4> kRotation = {
      DefectKind::unnecessary_workload, DefectKind::excessively_frequent_ops,
      DefectKind::background, DefectKind::no_sleep};
  constexpr std::array<ContextKind, 2> kWorkloadContexts = {
      ContextKind::network_fail, ContextKind::flight_mode};

  std::vector<AppModel> fleet;
  fleet.reserve(static_cast<std::size_t>(cfg.n_apps));
  std::size_t defect_seq = 0;
  for (int i = 0; i < cfg.n_apps; ++i) {
    SplitMix64 app_rng(derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(i)));
    AppModel app{
        "app-" + zero_padded(i, 3),
        cfg.categories[static_cast<std::size_t>(i) % cfg.categories.size()],
        generate_efg(app_rng, cfg.efg_min_nodes, cfg.efg_max_nodes),
        cfg.baseline_mw,
        {},
        cfg.noise_sd_mw};

    if (std::binary_search(defective.begin(), defective.end(), i)) {
      DefectSpec defect;
      defect.kind = kRotation[defect_seq % kRotation.size()];
      const MagnitudeRange& range =
          affected_stage(defect.kind) == trace::Stage::execution
              ? cfg.execution_magnitude
              : (defect.kind == DefectKind::background
                     ? cfg.background_magnitude
                     : cfg.nosleep_magnitude);
      defect.magnitude = app_rng.next_range(range.min, range.max);
      if (cfg.pin_trigger_context) {
        defect.trigger.context = *cfg.pin_trigger_context;
      } else if (affected_stage(defect.kind) == trace::Stage::execution) {
        defect.trigger.context =
            kWorkloadContexts[defect_seq % kWorkloadContexts.size()];
      }
      app.defects.push_back(std::move(defect));
      ++defect_seq;
    }
    app.validate();
    fleet.push_back(std::move(app));
  }
  return fleet;
}

namespace {

using nlohmann::json;
using internal::parse_json_text;
using internal::read_field;

std::array<double, 5> read_baselines(const json& j, const char* key,
                                     std::array<double, 5> fallback) {
  if (!j.contains(key)) return fallback;
  const json& arr = j.at(key);
  if (!arr.is_array() || arr.size() != 5) {
    throw Error(Errc::parse,
                std::string(key) + " must be an array of five numbers");
  }
  std::array<double, 5> out{};
  for (std::size_t i = 0; i < 5; ++i) out[i] = arr.at(i).get<double>();
  return out;
}

MagnitudeRange read_range(const json& j, const char* key,
                          MagnitudeRange fallback) {
  if (!j.contains(key)) return fallback;
  const json& arr = j.at(key);
  if (!arr.is_array() || arr.size() != 2) {
    throw Error(Errc::parse,
                std::string(key) + " must be a [min, max] pair");
  }
  return {arr.at(0).get<double>(), arr.at(1).get<double>()};
}

FleetConfig fleet_config_from_json(const json& j) {
  FleetConfig cfg;
  read_field(j, "n_apps", cfg.n_apps);
  read_field(j, "categories", cfg.categories);
  read_field(j, "defect_prevalence", cfg.defect_prevalence);
  read_field(j, "seed", cfg.seed);
  cfg.baseline_mw = read_baselines(j, "baseline_mw", cfg.baseline_mw);
  read_field(j, "noise_sd_mw", cfg.noise_sd_mw);
  cfg.execution_magnitude =
      read_range(j, "execution_magnitude", cfg.execution_magnitude);
  cfg.background_magnitude =
      read_range(j, "background_magnitude", cfg.background_magnitude);
  cfg.nosleep_magnitude =
      read_range(j, "nosleep_magnitude", cfg.nosleep_magnitude);
  if (j.contains("pin_trigger_context")) {
    const auto name = j.at("pin_trigger_context").get<std::string>();
    const auto kind = context_from_string(name);
    if (!kind) {
      throw Error(Errc::parse, "unknown context '" + name + "'");
    }
    cfg.pin_trigger_context = *kind;
  }
  read_field(j, "efg_min_nodes", cfg.efg_min_nodes);
  read_field(j, "efg_max_nodes", cfg.efg_max_nodes);
  cfg.validate();
  return cfg;
}

Trigger trigger_from_json(const json& j) {
  Trigger t;
  if (j.contains("context")) {
    const auto name = j.at("context").get<std::string>();
    const auto kind = context_from_string(name);
    if (!kind) {
      throw Error(Errc::parse, "unknown trigger context '" + name + "'");
    }
    t.context = *kind;
  }
  if (j.contains("node")) t.node = j.at("node").get<std::string>();
  if (j.contains("input")) {
    const auto name = j.at("input").get<std::string>();
    if (name == "weighted") {
      t.input = efg::InputKind::weighted;
    } else if (name == "random") {
      t.input = efg::InputKind::random;
    } else {
      throw Error(Errc::parse, "unknown trigger input kind '" + name + "'");
    }
  }
  return t;
}

AppModel app_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.contains("name") || !j.contains("efg")) {
    throw Error(Errc::parse, "app entries need name and efg fields");
  }
  std::filesystem::path efg_path = j.at("efg").get<std::string>();
  if (efg_path.is_relative()) efg_path = base_dir / efg_path;

  AppModel app{j.at("name").get<std::string>(),
               j.value("category", std::string("uncategorized")),
               efg::read_efg_file(efg_path),
               read_baselines(j, "baseline_mw",
                              {300.0, 1000.0, 1500.0, 1000.0, 300.0}),
               {},
               j.value("noise_sd_mw", 30.0)};
  if (j.contains("defects")) {
    for (const json& dj : j.at("defects")) {
      DefectSpec d;
      const auto kind_name = dj.at("kind").get<std::string>();
      const auto kind = defect_kind_from_string(kind_name);
      if (!kind) {
        throw Error(Errc::parse, "unknown defect kind '" + kind_name + "'");
      }
      d.kind = *kind;
      d.magnitude = dj.at("magnitude").get<double>();
      if (dj.contains("trigger")) d.trigger = trigger_from_json(dj.at("trigger"));
      d.sticky = dj.value("sticky", false);
      app.defects.push_back(std::move(d));
    }
  }
  app.validate();
  return app;
}

}  // namespace

FleetConfig fleet_config_from_json_text(const std::string& text) {
  const json j = parse_json_text(text, "fleet spec");
  if (j.contains("generator")) return fleet_config_from_json(j.at("generator"));
  return fleet_config_from_json(j);
}

std::vector<AppModel> load_fleet_file(const std::filesystem::path& path) {
  const json j =
      parse_json_text(internal::slurp_file(path), path.string());

  if (j.contains("generator")) {
    return generate_fleet(fleet_config_from_json(j.at("generator")));
  }
  if (j.contains("apps")) {
    std::vector<AppModel> fleet;
    for (const json& aj : j.at("apps")) {
      fleet.push_back(app_from_json(aj, path.parent_path()));
    }
    if (fleet.empty()) {
      throw Error(Errc::config, "fleet spec lists no apps");
    }
    return fleet;
  }
  throw Error(Errc::config,
              path.string() + ": fleet spec needs a generator or apps entry");
}

}  // namespace enertest::sim
