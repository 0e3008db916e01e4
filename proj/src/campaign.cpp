// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0

#include "enertest/campaign.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <thread>
#include <tuple>

#include "enertest/rng.hpp"
#include "json_util.hpp"

namespace enertest::campaign {

namespace {

using nlohmann::json;
using internal::parse_json_text;
using internal::read_field;
using internal::slurp_file;

std::string zero_padded(std::int64_t value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

void BudgetConfig::validate() const {
  if (cases < 0) {
    throw Error(Errc::config, "case budget must be nonnegative");
  }
  if (wall_clock_seconds && !(*wall_clock_seconds > 0.0)) {
    throw Error(Errc::config, "wall clock budget must be positive");
  }
}

void SequenceConfig::validate() const {
  efg::WeightConfig{alpha, beta}.validate();
  if (max_len < 1 || max_paths < 1 || random_length < 1) {
    throw Error(Errc::config, "sequence limits must be at least 1");
  }
}

void ChppPolicy::validate() const {
  if (!(idle_factor > 0.0) || min_duration_ms < 1) {
    throw Error(Errc::config, "invalid CHPP policy");
  }
}

void DetectionConfig::validate() const {
  thresholds.validate();
  dbscan.validate();
  chpp.validate();
  if (rebatch_interval < 1) {
    throw Error(Errc::config, "rebatch interval must be at least 1");
  }
}

void CampaignConfig::validate() const {
  if (fleet_path.empty()) {
    throw Error(Errc::config, "campaign needs a fleet spec path");
  }
  if (out_dir.empty()) {
    throw Error(Errc::config, "campaign needs an output directory");
  }
  if (workers < 1 || workers > 256) {
    throw Error(Errc::config, "workers must lie in [1, 256]");
  }
  budget.validate();
  detection.validate();
  steering.validate();
  sequences.validate();
  sim_params.validate();
}

// --- JSON (de)serialization -------------------------------------------------

namespace {

json descriptor_to_json(const efg::SequenceDescriptor& d) {
  json j;
  j["kind"] = std::string(efg::to_string(d.kind));
  if (d.kind == efg::InputKind::weighted) {
    j["path"] = d.path;
  } else {
    j["seed"] = d.seed;
    j["length"] = d.length;
  }
  return j;
}

efg::SequenceDescriptor descriptor_from_json(const json& j) {
  efg::SequenceDescriptor d;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "weighted") {
    d.kind = efg::InputKind::weighted;
    d.path = j.at("path").get<std::vector<std::string>>();
  } else if (kind == "random") {
    d.kind = efg::InputKind::random;
    d.seed = j.at("seed").get<std::uint64_t>();
    d.length = j.at("length").get<std::size_t>();
  } else {
    throw Error(Errc::parse, "unknown sequence kind '" + kind + "'");
  }
  return d;
}

json features_to_json(const trace::FeatureVector& f) {
  return json{{"l_chpp_ms", f.l_chpp_ms},
              {"n_chpp", f.n_chpp},
              {"mu_chpp_mw", f.mu_chpp_mw},
              {"mu_exe_mw", f.mu_exe_mw}};
}

trace::FeatureVector features_from_json(const json& j) {
  trace::FeatureVector f;
  f.l_chpp_ms = j.at("l_chpp_ms").get<double>();
  f.n_chpp = j.at("n_chpp").get<int>();
  f.mu_chpp_mw = j.at("mu_chpp_mw").get<double>();
  f.mu_exe_mw = j.at("mu_exe_mw").get<double>();
  return f;
}

json entry_to_json(const IssueEntry& e) {
  const detect::EnergyIssueRecord& r = e.record;
  json j;
  j["kind"] = std::string(detect::to_string(r.kind));
  j["stage"] = std::string(trace::to_string(detect::affected_stage(r.kind)));
  j["app"] = r.case_ref.app;
  j["context"] = r.case_ref.context;
  j["first_case"] = r.case_ref.id;
  j["sequence"] = descriptor_to_json(r.case_ref.sequence);
  j["seed"] = r.case_ref.seed;
  j["trace"] = r.case_ref.trace_path;
  j["waste_percent"] = r.waste_percent;
  j["dissimilarity"] = r.dissimilarity;
  j["e_x_mw"] = r.e_x_mw;
  j["e_n_mw"] = r.e_n_mw;
  j["features"] = features_to_json(r.features);
  j["hit_count"] = e.hit_count;
  j["case_ids"] = e.case_ids;
  j["inserted_at_case"] = e.inserted_at_case;
  return j;
}

IssueEntry entry_from_json(const json& j) {
  IssueEntry e;
  const auto kind_name = j.at("kind").get<std::string>();
  const auto kind = detect::issue_kind_from_string(kind_name);
  if (!kind) {
    throw Error(Errc::parse, "unknown issue kind '" + kind_name + "'");
  }
  e.record.kind = *kind;
  e.record.case_ref.app = j.at("app").get<std::string>();
  e.record.case_ref.context = j.at("context").get<std::string>();
  e.record.case_ref.id = j.at("first_case").get<std::string>();
  e.record.case_ref.sequence = descriptor_from_json(j.at("sequence"));
  e.record.case_ref.seed = j.at("seed").get<std::uint64_t>();
  e.record.case_ref.trace_path = j.at("trace").get<std::string>();
  e.record.waste_percent = j.at("waste_percent").get<double>();
  e.record.dissimilarity = j.at("dissimilarity").get<double>();
  e.record.e_x_mw = j.at("e_x_mw").get<double>();
  e.record.e_n_mw = j.at("e_n_mw").get<double>();
  e.record.features = features_from_json(j.at("features"));
  e.hit_count = j.at("hit_count").get<std::int64_t>();
  e.case_ids = j.at("case_ids").get<std::vector<std::string>>();
  e.inserted_at_case = j.at("inserted_at_case").get<std::int64_t>();
  return e;
}

json config_to_json(const CampaignConfig& c) {
  json j;
  j["fleet"] = c.fleet_path.string();
  j["budget"]["cases"] = c.budget.cases;
  if (c.budget.wall_clock_seconds) {
    j["budget"]["wall_clock_seconds"] = *c.budget.wall_clock_seconds;
  }
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["emit_plots"] = c.emit_plots;
  j["detection"] = {
      {"thresholds",
       {{"background", c.detection.thresholds.background},
        {"nosleep", c.detection.thresholds.nosleep},
        {"min_waste_report", c.detection.thresholds.min_waste_report}}},
      {"dbscan",
       {{"eps", c.detection.dbscan.eps},
        {"min_pts", c.detection.dbscan.min_pts}}},
      {"chpp",
       {{"idle_factor", c.detection.chpp.idle_factor},
        {"min_duration_ms", c.detection.chpp.min_duration_ms}}},
      {"rebatch_interval", c.detection.rebatch_interval},
      {"incremental_pass", c.detection.incremental_pass},
      {"final_pass", c.detection.final_pass}};
  j["steering"] = {{"delta_wei", c.steering.delta_wei},
                   {"delta_context", c.steering.delta_context},
                   {"wei_up_threshold", c.steering.wei_up_threshold},
                   {"wei_down_threshold", c.steering.wei_down_threshold},
                   {"cxt_up_threshold", c.steering.cxt_up_threshold},
                   {"cxt_down_threshold", c.steering.cxt_down_threshold}};
  j["sequences"] = {{"alpha", c.sequences.alpha},
                    {"beta", c.sequences.beta},
                    {"max_len", c.sequences.max_len},
                    {"max_paths", c.sequences.max_paths},
                    {"random_length", c.sequences.random_length}};
  j["sim"] = {
      {"stage_duration_ms", c.sim_params.stage_duration_ms},
      {"sample_period_ms", c.sim_params.sample_period_ms},
      {"efo_period_ms", c.sim_params.efo_period_ms},
      {"efo_duty", c.sim_params.efo_duty},
      {"os_noise",
       {{"enabled", c.sim_params.os_noise.enabled},
        {"events_per_minute", c.sim_params.os_noise.events_per_minute},
        {"min_amplitude_mw", c.sim_params.os_noise.min_amplitude_mw},
        {"max_amplitude_mw", c.sim_params.os_noise.max_amplitude_mw},
        {"min_duration_ms", c.sim_params.os_noise.min_duration_ms},
        {"max_duration_ms", c.sim_params.os_noise.max_duration_ms}}}};
  return j;
}

void config_from_json(const json& j, CampaignConfig& cfg) {
  if (j.contains("budget")) {
    const json& b = j.at("budget");
    read_field(b, "cases", cfg.budget.cases);
    if (b.contains("wall_clock_seconds")) {
      cfg.budget.wall_clock_seconds =
          b.at("wall_clock_seconds").get<double>();
    }
  }
  read_field(j, "seed", cfg.seed);
  read_field(j, "workers", cfg.workers);
  read_field(j, "emit_plots", cfg.emit_plots);
  if (j.contains("detection")) {
    const json& d = j.at("detection");
    if (d.contains("thresholds")) {
      const json& t = d.at("thresholds");
      read_field(t, "background", cfg.detection.thresholds.background);
      read_field(t, "nosleep", cfg.detection.thresholds.nosleep);
      read_field(t, "min_waste_report",
                 cfg.detection.thresholds.min_waste_report);
    }
    if (d.contains("dbscan")) {
      const json& s = d.at("dbscan");
      read_field(s, "eps", cfg.detection.dbscan.eps);
      read_field(s, "min_pts", cfg.detection.dbscan.min_pts);
    }
    if (d.contains("chpp")) {
      const json& ch = d.at("chpp");
      read_field(ch, "idle_factor", cfg.detection.chpp.idle_factor);
      read_field(ch, "min_duration_ms", cfg.detection.chpp.min_duration_ms);
    }
    read_field(d, "rebatch_interval", cfg.detection.rebatch_interval);
    read_field(d, "incremental_pass", cfg.detection.incremental_pass);
    read_field(d, "final_pass", cfg.detection.final_pass);
  }
  if (j.contains("steering")) {
    const json& s = j.at("steering");
    read_field(s, "delta_wei", cfg.steering.delta_wei);
    read_field(s, "delta_context", cfg.steering.delta_context);
    read_field(s, "wei_up_threshold", cfg.steering.wei_up_threshold);
    read_field(s, "wei_down_threshold", cfg.steering.wei_down_threshold);
    read_field(s, "cxt_up_threshold", cfg.steering.cxt_up_threshold);
    read_field(s, "cxt_down_threshold", cfg.steering.cxt_down_threshold);
  }
  if (j.contains("sequences")) {
    const json& s = j.at("sequences");
    read_field(s, "alpha", cfg.sequences.alpha);
    read_field(s, "beta", cfg.sequences.beta);
    read_field(s, "max_len", cfg.sequences.max_len);
    read_field(s, "max_paths", cfg.sequences.max_paths);
    read_field(s, "random_length", cfg.sequences.random_length);
  }
  if (j.contains("sim")) {
    const json& s = j.at("sim");
    if (s.contains("stage_duration_ms")) {
      const json& arr = s.at("stage_duration_ms");
      if (!arr.is_array() || arr.size() != 5) {
        throw Error(Errc::parse,
                    "stage_duration_ms must be an array of five integers");
      }
      for (std::size_t i = 0; i < 5; ++i) {
        cfg.sim_params.stage_duration_ms[i] = arr.at(i).get<std::int64_t>();
      }
    }
    read_field(s, "sample_period_ms", cfg.sim_params.sample_period_ms);
    read_field(s, "efo_period_ms", cfg.sim_params.efo_period_ms);
    read_field(s, "efo_duty", cfg.sim_params.efo_duty);
    if (s.contains("os_noise")) {
      const json& o = s.at("os_noise");
      read_field(o, "enabled", cfg.sim_params.os_noise.enabled);
      read_field(o, "events_per_minute",
                 cfg.sim_params.os_noise.events_per_minute);
      read_field(o, "min_amplitude_mw",
                 cfg.sim_params.os_noise.min_amplitude_mw);
      read_field(o, "max_amplitude_mw",
                 cfg.sim_params.os_noise.max_amplitude_mw);
      read_field(o, "min_duration_ms",
                 cfg.sim_params.os_noise.min_duration_ms);
      read_field(o, "max_duration_ms",
                 cfg.sim_params.os_noise.max_duration_ms);
    }
  }
}

}  // namespace

CampaignConfig load_campaign_config(const std::filesystem::path& path) {
  const json j = parse_json_text(slurp_file(path), path.string());
  CampaignConfig cfg;
  if (!j.contains("fleet")) {
    throw Error(Errc::config, path.string() + ": missing fleet entry");
  }
  cfg.fleet_path = j.at("fleet").get<std::string>();
  if (cfg.fleet_path.is_relative()) {
    cfg.fleet_path = path.parent_path() / cfg.fleet_path;
  }
  config_from_json(j, cfg);
  return cfg;
}

// --- campaign loop ----------------------------------------------------------

namespace {

/// Plot-friendly reduction: bucket means, at most max_points rows, keeping
/// each bucket's first timestamp.
std::vector<std::pair<std::int64_t, double>> downsample(
    const trace::PowerTrace& t, std::size_t max_points = 240) {
  const std::size_t n = t.samples.size();
  const std::size_t bucket = (n + max_points - 1) / max_points;
  std::vector<std::pair<std::int64_t, double>> out;
  for (std::size_t i = 0; i < n; i += bucket) {
    const std::size_t end = std::min(n, i + bucket);
    double sum = 0.0;
    for (std::size_t k = i; k < end; ++k) sum += t.samples[k].p_mw;
    out.emplace_back(t.samples[i].t_ms,
                     sum / static_cast<double>(end - i));
  }
  return out;
}

struct SteerMeta {
  efg::InputKind input = efg::InputKind::random;
  std::size_t context_index = 0;
  std::string context_name;
};

struct CategoryCorpus {
  std::vector<detect::ExecutionCase> cases;
  std::size_t last_pass_size = 0;
};

struct PlannedCase {
  std::int64_t index = 0;
  std::size_t app_index = 0;
  efg::SequenceDescriptor sequence;
  efg::InputKind input = efg::InputKind::random;
  std::size_t context_index = 0;
  sim::RunningContext ctx;
  std::uint64_t case_seed = 0;
};

}  // namespace

CampaignResult run_campaign(const CampaignConfig& config) {
  config.validate();
  const std::vector<sim::AppModel> fleet =
      sim::load_fleet_file(config.fleet_path);

  const efg::WeightConfig weight_cfg{config.sequences.alpha,
                                     config.sequences.beta};
  std::vector<std::vector<efg::WeightedSequence>> pools;
  pools.reserve(fleet.size());
  for (const sim::AppModel& app : fleet) {
    pools.push_back(efg::build_pool(app.efg, config.sequences.max_len,
                                    config.sequences.max_paths, weight_cfg));
  }

  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir / "traces");
  if (config.emit_plots) fs::create_directories(config.out_dir / "plots");

  std::ofstream cases_out(config.out_dir / "cases.jsonl");
  std::ofstream steer_out(config.out_dir / "steering_log.jsonl");
  if (!cases_out || !steer_out) {
    throw Error(Errc::io,
                "cannot write into " + config.out_dir.string());
  }

  steer::SteeringState state = steer::init(sim::kContextOrder.size());
  SplitMix64 steer_rng(derive_seed(config.seed, 0));

  std::vector<sim::Simulator> simulators;
  for (int w = 0; w < config.workers; ++w) {
    simulators.emplace_back(config.sim_params);
  }

  CampaignResult result;
  result.out_dir = config.out_dir;
  std::map<std::tuple<std::string, int, std::string>, std::size_t>
      entry_by_identity;
  std::set<std::pair<std::string, int>> evented;
  std::map<std::string, CategoryCorpus> corpora;
  std::vector<SteerMeta> metas;
  std::map<std::string, std::size_t> index_by_id;

  const auto record_event = [&](const std::string& case_id,
                                detect::IssueKind kind) {
    if (!evented.emplace(case_id, static_cast<int>(kind)).second) return;
    const SteerMeta& meta = metas[index_by_id.at(case_id)];
    steer::update_on_issue(state, meta.input, meta.context_index,
                           config.steering);
    ++result.detection_events;
    steer_out << json{{"event", result.detection_events},
                      {"case", case_id},
                      {"kind", std::string(detect::to_string(kind))},
                      {"input", std::string(efg::to_string(meta.input))},
                      {"context", meta.context_name},
                      {"p_wei", state.p_wei},
                      {"p_ctx", state.p_ctx}}
                     .dump()
              << '\n';
  };

  const auto record_hit = [&](detect::EnergyIssueRecord rec,
                              std::int64_t at_case) {
    const std::tuple<std::string, int, std::string> identity{
        rec.case_ref.app, static_cast<int>(rec.kind), rec.case_ref.context};
    auto it = entry_by_identity.find(identity);
    if (it != entry_by_identity.end()) {
      IssueEntry& entry = result.issues[it->second];
      ++entry.hit_count;
      entry.case_ids.push_back(rec.case_ref.id);
      return;
    }
    IssueEntry entry;
    entry.case_ids.push_back(rec.case_ref.id);
    entry.record = std::move(rec);
    entry.inserted_at_case = at_case;
    entry_by_identity.emplace(identity, result.issues.size());
    result.issues.push_back(std::move(entry));
  };

  const auto run_incremental = [&](CategoryCorpus& corpus) {
    if (!config.detection.incremental_pass) return;
    const auto min_pts =
        static_cast<std::size_t>(config.detection.dbscan.min_pts);
    if (corpus.cases.size() < min_pts) return;
    if (corpus.last_pass_size != 0 &&
        corpus.cases.size() - corpus.last_pass_size <
            static_cast<std::size_t>(config.detection.rebatch_interval)) {
      return;
    }
    const auto records = detect::detect_execution(
        corpus.cases, config.detection.dbscan, config.detection.thresholds);
    for (const detect::EnergyIssueRecord& rec : records) {
      record_event(rec.case_ref.id, detect::IssueKind::execution);
    }
    corpus.last_pass_size = corpus.cases.size();
  };

  const auto start_time = std::chrono::steady_clock::now();
  const auto budget_open = [&](std::int64_t next_index) {
    if (config.budget.wall_clock_seconds) {
      const std::chrono::duration<double> elapsed =
          std::chrono::steady_clock::now() - start_time;
      return elapsed.count() < *config.budget.wall_clock_seconds;
    }
    return next_index < config.budget.cases;
  };

  std::int64_t case_index = 0;
  while (budget_open(case_index)) {
    // Plan a batch: steering choices and sequence picks happen here, in
    // case order, before any case of the batch runs.
    std::vector<PlannedCase> batch;
    while (static_cast<int>(batch.size()) < config.workers) {
      const std::int64_t next =
          case_index + static_cast<std::int64_t>(batch.size());
      // A wall-clock budget always fills the batch; a case budget stops at
      // the exact case count.
      if (!config.budget.wall_clock_seconds && next >= config.budget.cases) {
        break;
      }
      PlannedCase plan;
      plan.index = next;
      plan.app_index =
          static_cast<std::size_t>(plan.index) % fleet.size();
      plan.case_seed =
          derive_seed(config.seed, 1 + static_cast<std::uint64_t>(plan.index));
      const steer::Choice choice = steer::choose(state, steer_rng);
      plan.context_index = choice.context;
      plan.ctx = sim::RunningContext::make(sim::kContextOrder[choice.context]);
      bool have_sequence = false;
      if (choice.input == efg::InputKind::weighted) {
        if (efg::WeightedSequence* seq =
                efg::next_weighted(pools[plan.app_index])) {
          plan.input = efg::InputKind::weighted;
          plan.sequence.kind = efg::InputKind::weighted;
          plan.sequence.path = seq->path;
          have_sequence = true;
        }
      }
      if (!have_sequence) {
        // Either a random draw or the weighted pool is drained; the case
        // records the kind that actually ran.
        plan.input = efg::InputKind::random;
        plan.sequence.kind = efg::InputKind::random;
        plan.sequence.seed = derive_seed(plan.case_seed, 1);
        plan.sequence.length = config.sequences.random_length;
      }
      batch.push_back(std::move(plan));
    }
    if (batch.empty()) break;

    std::vector<sim::TestCase> outcomes(batch.size());
    std::vector<std::exception_ptr> failures(batch.size());
    const auto run_one = [&](std::size_t slot) {
      try {
        simulators[slot].reset();
        const PlannedCase& plan = batch[slot];
        outcomes[slot] = simulators[slot].run_case(
            fleet[plan.app_index], plan.sequence, plan.ctx,
            derive_seed(plan.case_seed, 2));
      } catch (...) {
        failures[slot] = std::current_exception();
      }
    };
    if (batch.size() == 1) {
      run_one(0);
    } else {
      std::vector<std::thread> threads;
      threads.reserve(batch.size());
      for (std::size_t slot = 0; slot < batch.size(); ++slot) {
        threads.emplace_back(run_one, slot);
      }
      for (std::thread& t : threads) t.join();
    }
    for (const std::exception_ptr& failure : failures) {
      if (failure) std::rethrow_exception(failure);
    }

    for (std::size_t slot = 0; slot < batch.size(); ++slot) {
      const PlannedCase& plan = batch[slot];
      const sim::TestCase& outcome = outcomes[slot];
      const sim::AppModel& app = fleet[plan.app_index];
      const std::string case_id = "case-" + zero_padded(plan.index, 6);
      const std::string trace_rel = "traces/" + case_id + ".trace";
      trace::write_trace_file(outcome.staged, config.out_dir / trace_rel);

      const double idle_mean =
          trace::mean_power(outcome.staged, trace::Stage::idle);
      const trace::ChppConfig chpp_cfg{
          config.detection.chpp.idle_factor * idle_mean,
          config.detection.chpp.min_duration_ms};
      const trace::FeatureVector features =
          trace::features(outcome.staged, chpp_cfg);

      std::array<bool, 3> truth{false, false, false};
      for (const sim::DefectSpec& d : outcome.triggered) {
        switch (sim::affected_stage(d.kind)) {
          case trace::Stage::execution:
            truth[static_cast<std::size_t>(detect::IssueKind::execution)] =
                true;
            break;
          case trace::Stage::background:
            truth[static_cast<std::size_t>(detect::IssueKind::background)] =
                true;
            break;
          default:
            truth[static_cast<std::size_t>(detect::IssueKind::nosleep)] = true;
            break;
        }
      }

      json stage_means;
      for (trace::Stage s : trace::kStageOrder) {
        if (outcome.staged.has(s)) {
          stage_means[std::string(trace::to_string(s))] =
              trace::mean_power(outcome.staged, s);
        }
      }
      const std::string context_name{sim::to_string(plan.ctx.kind)};
      cases_out << json{{"id", case_id},
                        {"app", app.name},
                        {"category", app.category},
                        {"input", std::string(efg::to_string(plan.input))},
                        {"sequence", descriptor_to_json(plan.sequence)},
                        {"context", context_name},
                        {"context_index", plan.context_index},
                        {"seed", plan.case_seed},
                        {"has_background",
                         outcome.staged.has(trace::Stage::background)},
                        {"stage_means", stage_means},
                        {"features", features_to_json(features)},
                        {"trace", trace_rel},
                        {"truth",
                         {{"execution", truth[0]},
                          {"background", truth[1]},
                          {"nosleep", truth[2]}}}}
                       .dump()
                << '\n';

      metas.push_back(
          {plan.input, plan.context_index, context_name});
      index_by_id.emplace(case_id, metas.size() - 1);

      detect::CaseRef ref;
      ref.id = case_id;
      ref.app = app.name;
      ref.sequence = plan.sequence;
      ref.context = context_name;
      ref.seed = plan.case_seed;
      ref.trace_path = trace_rel;

      if (const auto finding = detect::detect_background(
              outcome.staged, config.detection.thresholds)) {
        detect::EnergyIssueRecord rec;
        rec.kind = detect::IssueKind::background;
        rec.case_ref = ref;
        rec.features = features;
        rec.waste_percent = finding->waste_percent;
        rec.dissimilarity = finding->dissimilarity;
        rec.e_x_mw = finding->e_x_mw;
        rec.e_n_mw = finding->e_n_mw;
        record_hit(std::move(rec), plan.index + 1);
        record_event(case_id, detect::IssueKind::background);
      }
      if (const auto finding = detect::detect_nosleep(
              outcome.staged, config.detection.thresholds)) {
        detect::EnergyIssueRecord rec;
        rec.kind = detect::IssueKind::nosleep;
        rec.case_ref = ref;
        rec.features = features;
        rec.waste_percent = finding->waste_percent;
        rec.dissimilarity = finding->dissimilarity;
        rec.e_x_mw = finding->e_x_mw;
        rec.e_n_mw = finding->e_n_mw;
        record_hit(std::move(rec), plan.index + 1);
        record_event(case_id, detect::IssueKind::nosleep);
      }

      CategoryCorpus& corpus = corpora[app.category];
      corpus.cases.push_back({std::move(ref), features});
      run_incremental(corpus);
      ++case_index;
    }
  }
  result.cases_run = case_index;

  // Authoritative execution pass over each category's full corpus.
  if (config.detection.final_pass) {
    for (auto& [category, corpus] : corpora) {
      if (corpus.cases.size() <
          static_cast<std::size_t>(config.detection.dbscan.min_pts)) {
        result.categories_skipped.push_back(category);
        continue;
      }
      const auto records = detect::detect_execution(
          corpus.cases, config.detection.dbscan, config.detection.thresholds);
      for (const detect::EnergyIssueRecord& rec : records) {
        const std::string case_id = rec.case_ref.id;
        record_hit(rec, result.cases_run);
        record_event(case_id, detect::IssueKind::execution);
      }
    }
  }

  // Persist the database.
  json issues_json = json::array();
  for (const IssueEntry& entry : result.issues) {
    issues_json.push_back(entry_to_json(entry));
  }
  {
    std::ofstream out(config.out_dir / "issues.json");
    out << json{{"issues", issues_json}}.dump(2) << '\n';
  }

  std::array<KindSummary, 3> per_kind;
  for (const IssueEntry& entry : result.issues) {
    KindSummary& ks = per_kind[static_cast<std::size_t>(entry.record.kind)];
    ++ks.count;
    ks.waste_mean += entry.record.waste_percent;
    ks.waste_max = std::max(ks.waste_max, entry.record.waste_percent);
  }
  json per_kind_json;
  for (detect::IssueKind kind :
       {detect::IssueKind::execution, detect::IssueKind::background,
        detect::IssueKind::nosleep}) {
    KindSummary& ks = per_kind[static_cast<std::size_t>(kind)];
    if (ks.count > 0) ks.waste_mean /= static_cast<double>(ks.count);
    per_kind_json[std::string(detect::to_string(kind))] = {
        {"count", ks.count},
        {"waste_mean", ks.waste_mean},
        {"waste_max", ks.waste_max}};
  }
  {
    json summary{{"cases_run", result.cases_run},
                 {"issues_total", result.issues.size()},
                 {"per_kind", per_kind_json},
                 {"detection_events", result.detection_events},
                 {"categories_skipped", result.categories_skipped},
                 {"steering",
                  {{"p_wei", state.p_wei}, {"p_ctx", state.p_ctx}}},
                 {"seed", config.seed},
                 {"workers", config.workers}};
    if (config.budget.wall_clock_seconds) {
      summary["budget_wall_clock_seconds"] = *config.budget.wall_clock_seconds;
    } else {
      summary["budget_cases"] = config.budget.cases;
    }
    std::ofstream out(config.out_dir / "summary.json");
    out << summary.dump(2) << '\n';
  }
  {
    std::ofstream out(config.out_dir / "config_used.json");
    out << config_to_json(config).dump(2) << '\n';
  }

  if (config.emit_plots) {
    std::set<std::string> plotted;
    for (const IssueEntry& entry : result.issues) {
      for (const std::string& case_id : entry.case_ids) {
        if (!plotted.insert(case_id).second) continue;
        const trace::StagedTrace staged = trace::read_trace_file(
            config.out_dir / "traces" / (case_id + ".trace"));
        std::ofstream out(config.out_dir / "plots" / (case_id + ".csv"));
        out << "t_ms,p_mw\n";
        for (const auto& [t, p] : downsample(staged.trace)) {
          out << t << ',' << trace::format_double(p) << '\n';
        }
      }
    }
  }

  result.final_steering = state;
  return result;
}

// --- report generation ------------------------------------------------------

namespace {

std::string rationale_for(detect::IssueKind kind, const json& config_used) {
  const json& det = config_used.at("detection");
  switch (kind) {
    case detect::IssueKind::execution: {
      const auto eps = det.at("dbscan").at("eps").get<double>();
      const auto min_pts = det.at("dbscan").at("min_pts").get<int>();
      return "Density clustering over this app category's EXECUTION features "
             "(total CHPP length, CHPP count, CHPP mean power, stage mean "
             "power; eps " +
             trace::format_double(eps) + ", MinPts " +
             std::to_string(min_pts) +
             ") left this case outside every dense cluster, and its "
             "EXECUTION mean power exceeds the category mean. Waste compares "
             "the case against the mean of the non-outlier cases.";
    }
    case detect::IssueKind::background: {
      const auto th =
          det.at("thresholds").at("background").get<double>();
      return "After the app was sent to the background its power should fall "
             "back to the idle level. The BACKGROUND stage mean exceeded the "
             "IDLE stage mean by more than the threshold of " +
             trace::format_double(th * 100.0) +
             "%, which indicates background work that delivers no "
             "foreground value.";
    }
    case detect::IssueKind::nosleep: {
      const auto th = det.at("thresholds").at("nosleep").get<double>();
      return "After screen-off the device should sleep as deeply as it did "
             "before the test. The SCREEN-OFF stage mean exceeded the "
             "PRE-OFF stage mean by more than the threshold of " +
             trace::format_double(th * 100.0) +
             "%, which indicates the app keeps the device awake, typically "
             "through a held wake lock.";
    }
  }
  return "";
}

std::string describe_sequence(const json& seq) {
  if (seq.at("kind").get<std::string>() == "weighted") {
    std::string out = "weighted path ";
    bool first = true;
    for (const auto& node : seq.at("path")) {
      if (!first) out += " > ";
      out += node.get<std::string>();
      first = false;
    }
    return out;
  }
  return "random sequence, seed " +
         std::to_string(seq.at("seed").get<std::uint64_t>()) + ", " +
         std::to_string(seq.at("length").get<std::size_t>()) + " events";
}

std::string describe_context(const std::string& name) {
  const auto kind = sim::context_from_string(name);
  if (!kind) return name;
  const sim::RunningContext ctx = sim::RunningContext::make(*kind);
  std::string out = name;
  if (ctx.delay_ms) {
    out += " (delay " + trace::format_double(*ctx.delay_ms) + " ms, " +
           trace::format_double(*ctx.bandwidth_kbps) + " Kb/s";
  } else {
    out += " (network off, GPS " + std::string(ctx.gps_enabled ? "on" : "off");
  }
  if (!ctx.has_background_stage) out += ", no background stage";
  out += ")";
  return out;
}

double recompute_waste(const IssueEntry& entry, const trace::StagedTrace& staged,
                       const json& config_used) {
  switch (entry.record.kind) {
    case detect::IssueKind::execution: {
      const double mu_exe =
          trace::mean_power(staged, trace::Stage::execution);
      return trace::energy_waste(mu_exe, entry.record.e_n_mw);
    }
    case detect::IssueKind::background:
      return trace::energy_waste(
          trace::mean_power(staged, trace::Stage::background),
          trace::mean_power(staged, trace::Stage::idle));
    case detect::IssueKind::nosleep:
      return trace::energy_waste(
          trace::mean_power(staged, trace::Stage::screen_off),
          trace::mean_power(staged, trace::Stage::pre_off));
  }
  (void)config_used;
  return 0.0;
}

}  // namespace

void generate_report(const std::filesystem::path& db_dir) {
  const json summary =
      parse_json_text(slurp_file(db_dir / "summary.json"), "summary.json");
  const json issues_doc =
      parse_json_text(slurp_file(db_dir / "issues.json"), "issues.json");
  const json config_used = parse_json_text(
      slurp_file(db_dir / "config_used.json"), "config_used.json");

  namespace fs = std::filesystem;
  fs::create_directories(db_dir / "report" / "issues");

  std::ofstream md(db_dir / "report" / "report.md");
  if (!md) {
    throw Error(Errc::io, "cannot write report under " + db_dir.string());
  }
  md << "# Energy issue report\n\n";
  md << "Campaign of " << summary.at("cases_run").get<std::int64_t>()
     << " test cases, seed " << summary.at("seed").get<std::uint64_t>()
     << ".\n\n";
  const json& per_kind = summary.at("per_kind");
  md << "| kind | issues | waste mean % | waste max % |\n";
  md << "|------|--------|--------------|-------------|\n";
  for (const auto& [kind, stats] : per_kind.items()) {
    md << "| " << kind << " | " << stats.at("count").get<std::int64_t>()
       << " | "
       << trace::format_double(stats.at("waste_mean").get<double>()) << " | "
       << trace::format_double(stats.at("waste_max").get<double>())
       << " |\n";
  }
  md << '\n';

  const json& issues = issues_doc.at("issues");
  if (issues.empty()) {
    md << "No issues detected within the budget.\n";
    std::ofstream index_out(db_dir / "report" / "index.json");
    index_out << json{{"issues", json::array()}}.dump(2) << '\n';
    return;
  }

  json index = json::array();
  std::size_t counter = 0;
  for (const json& issue_json : issues) {
    const IssueEntry entry = entry_from_json(issue_json);
    const std::string issue_id = "issue-" + zero_padded(
        static_cast<std::int64_t>(counter), 3);
    ++counter;

    const trace::StagedTrace staged =
        trace::read_trace_file(db_dir / entry.record.case_ref.trace_path);
    const double recomputed = recompute_waste(entry, staged, config_used);

    json stage_starts;
    for (const trace::StageMarker& m : staged.markers.boundaries) {
      stage_starts[std::string(trace::to_string(m.stage))] = m.start_ms;
    }
    json series = json::array();
    for (const auto& [t, p] : downsample(staged.trace)) {
      series.push_back(json::array({t, p}));
    }
    const std::string rationale =
        rationale_for(entry.record.kind, config_used);
    {
      std::ofstream out(db_dir / "report" / "issues" / (issue_id + ".json"));
      out << json{{"id", issue_id},
                  {"kind", issue_json.at("kind")},
                  {"app", issue_json.at("app")},
                  {"context", issue_json.at("context")},
                  {"sequence", issue_json.at("sequence")},
                  {"case", entry.record.case_ref.id},
                  {"trace", entry.record.case_ref.trace_path},
                  {"series", series},
                  {"stage_starts", stage_starts},
                  {"evidence",
                   {{"features", issue_json.at("features")},
                    {"dissimilarity", entry.record.dissimilarity},
                    {"e_x_mw", entry.record.e_x_mw},
                    {"e_n_mw", entry.record.e_n_mw}}},
                  {"waste_percent", entry.record.waste_percent},
                  {"waste_recomputed", recomputed},
                  {"hit_count", entry.hit_count},
                  {"rationale", rationale}}
                 .dump(2)
          << '\n';
    }
    index.push_back({{"id", issue_id},
                     {"kind", issue_json.at("kind")},
                     {"app", issue_json.at("app")},
                     {"file", "issues/" + issue_id + ".json"}});

    md << "## " << issue_id << ": " << issue_json.at("kind").get<std::string>()
       << " issue in " << entry.record.case_ref.app << "\n\n";
    md << "- Context: "
       << describe_context(entry.record.case_ref.context) << '\n';
    md << "- Input: " << describe_sequence(issue_json.at("sequence")) << '\n';
    md << "- Trace: `" << entry.record.case_ref.trace_path
       << "` (downsampled series in `report/issues/" << issue_id
       << ".json`)\n";
    if (entry.record.kind == detect::IssueKind::execution) {
      md << "- Evidence: EXECUTION mean "
         << trace::format_double(entry.record.e_x_mw)
         << " mW vs non-outlier mean "
         << trace::format_double(entry.record.e_n_mw) << " mW; features "
         << issue_json.at("features").dump() << '\n';
    } else {
      md << "- Evidence: suspect stage mean "
         << trace::format_double(entry.record.e_x_mw)
         << " mW vs baseline mean "
         << trace::format_double(entry.record.e_n_mw)
         << " mW, dissimilarity "
         << trace::format_double(entry.record.dissimilarity) << '\n';
    }
    md << "- Waste: " << trace::format_double(entry.record.waste_percent)
       << "% (recomputed from trace: " << trace::format_double(recomputed)
       << "%)\n";
    md << "- Hits: " << entry.hit_count << " case(s)\n";
    md << "- Rationale: " << rationale << "\n\n";
  }
  std::ofstream index_out(db_dir / "report" / "index.json");
  index_out << json{{"issues", index}}.dump(2) << '\n';
}

// --- scoring ----------------------------------------------------------------

detect::Score score_database(const std::filesystem::path& db_dir,
                             const std::filesystem::path& fleet_path) {
  const std::vector<sim::AppModel> fleet = sim::load_fleet_file(fleet_path);
  std::map<std::string, const sim::AppModel*> by_name;
  for (const sim::AppModel& app : fleet) by_name[app.name] = &app;

  std::ifstream cases_in(db_dir / "cases.jsonl");
  if (!cases_in) {
    throw Error(Errc::io,
                "cannot open " + (db_dir / "cases.jsonl").string());
  }
  std::vector<detect::TruthCase> truths;
  std::string line;
  while (std::getline(cases_in, line)) {
    if (line.empty()) continue;
    const json j = parse_json_text(line, "cases.jsonl");
    const auto app_name = j.at("app").get<std::string>();
    const auto it = by_name.find(app_name);
    if (it == by_name.end()) {
      throw Error(Errc::config, "fleet spec does not list app " + app_name);
    }
    const auto context_name = j.at("context").get<std::string>();
    const auto kind = sim::context_from_string(context_name);
    if (!kind) {
      throw Error(Errc::parse, "unknown context '" + context_name + "'");
    }
    const efg::SequenceDescriptor desc =
        descriptor_from_json(j.at("sequence"));
    const auto triggered = sim::triggered_defects(
        *it->second, desc, sim::RunningContext::make(*kind));

    detect::TruthCase truth;
    truth.id = j.at("id").get<std::string>();
    for (const sim::DefectSpec& d : triggered) {
      switch (sim::affected_stage(d.kind)) {
        case trace::Stage::execution: truth.truth[0] = true; break;
        case trace::Stage::background: truth.truth[1] = true; break;
        default: truth.truth[2] = true; break;
      }
    }
    const json& stored = j.at("truth");
    if (stored.at("execution").get<bool>() != truth.truth[0] ||
        stored.at("background").get<bool>() != truth.truth[1] ||
        stored.at("nosleep").get<bool>() != truth.truth[2]) {
      throw Error(Errc::config,
                  "stored ground truth disagrees with the fleet spec for " +
                      truth.id + "; wrong fleet file?");
    }
    truths.push_back(std::move(truth));
  }

  const json issues_doc =
      parse_json_text(slurp_file(db_dir / "issues.json"), "issues.json");
  std::vector<detect::EnergyIssueRecord> records;
  for (const json& issue_json : issues_doc.at("issues")) {
    const IssueEntry entry = entry_from_json(issue_json);
    for (const std::string& case_id : entry.case_ids) {
      detect::EnergyIssueRecord rec;
      rec.kind = entry.record.kind;
      rec.case_ref.id = case_id;
      records.push_back(std::move(rec));
    }
  }

  const detect::Score score =
      detect::score_against_ground_truth(records, truths);
  json score_json;
  for (detect::IssueKind kind :
       {detect::IssueKind::execution, detect::IssueKind::background,
        detect::IssueKind::nosleep}) {
    const detect::KindScore& ks = score.of(kind);
    score_json[std::string(detect::to_string(kind))] = {
        {"precision", ks.precision},
        {"recall", ks.recall},
        {"tp", ks.tp},
        {"fp", ks.fp},
        {"fn", ks.fn},
        {"vacuous_precision", ks.vacuous_precision},
        {"vacuous_recall", ks.vacuous_recall}};
  }
  std::ofstream out(db_dir / "score.json");
  out << score_json.dump(2) << '\n';
  return score;
}

}  // namespace enertest::campaign
