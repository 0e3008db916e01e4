// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "enertest/efg.hpp"
#include "enertest/sim.hpp"
#include "enertest/trace.hpp"
#include "helpers.hpp"

using namespace enertest;
using enertest::testing::ScratchDir;

namespace {

efg::EventFlowGraph chain_efg() {
  return efg::EventFlowGraph(
      "A", {"A", "B", "C"},
      {{"A", "B", 2, 4}, {"B", "C", 1, 3}});
}

sim::AppModel make_app(std::vector<sim::DefectSpec> defects = {},
                       double noise_sd = 0.0) {
  return sim::AppModel{"fixture",
                       "test",
                       chain_efg(),
                       {300.0, 1000.0, 1500.0, 1000.0, 300.0},
                       std::move(defects),
                       noise_sd};
}

efg::SequenceDescriptor weighted_ab() {
  efg::SequenceDescriptor seq;
  seq.kind = efg::InputKind::weighted;
  seq.path = {"A", "B"};
  return seq;
}

efg::SequenceDescriptor random_seq(std::uint64_t seed = 9, int length = 5) {
  efg::SequenceDescriptor seq;
  seq.kind = efg::InputKind::random;
  seq.seed = seed;
  seq.length = length;
  return seq;
}

sim::SimParams short_params() {
  sim::SimParams p;
  p.stage_duration_ms = {2000, 2000, 16000, 3000, 3000};
  return p;
}

sim::DefectSpec defect(sim::DefectKind kind, double magnitude,
                       sim::Trigger trigger = {}, bool sticky = false) {
  sim::DefectSpec d;
  d.kind = kind;
  d.trigger = std::move(trigger);
  d.magnitude = magnitude;
  d.sticky = sticky;
  return d;
}

}  // namespace

TEST_CASE("canonical running contexts") {
  const auto normal = sim::RunningContext::make(sim::ContextKind::normal);
  CHECK(normal.delay_ms == 36.0);
  CHECK(normal.bandwidth_kbps == 3200.0);
  CHECK(normal.gps_enabled);
  CHECK(normal.has_background_stage);

  const auto net = sim::RunningContext::make(sim::ContextKind::network_fail);
  CHECK(net.delay_ms == 451.0);
  CHECK(net.bandwidth_kbps == 12.0);
  CHECK(net.has_background_stage);

  const auto flight = sim::RunningContext::make(sim::ContextKind::flight_mode);
  CHECK_FALSE(flight.delay_ms.has_value());
  CHECK_FALSE(flight.bandwidth_kbps.has_value());
  CHECK(flight.gps_enabled);
  CHECK(flight.has_background_stage);

  const auto nbg = sim::RunningContext::make(sim::ContextKind::non_background);
  CHECK(nbg.delay_ms == 36.0);
  CHECK_FALSE(nbg.has_background_stage);

  CHECK(sim::to_string(sim::ContextKind::network_fail) == "network_fail");
  CHECK(sim::context_from_string("flight_mode") ==
        sim::ContextKind::flight_mode);
  CHECK_FALSE(sim::context_from_string("nope").has_value());
}

TEST_CASE("trigger predicates") {
  const auto normal = sim::RunningContext::make(sim::ContextKind::normal);
  const auto net = sim::RunningContext::make(sim::ContextKind::network_fail);
  const auto wab = weighted_ab();
  const auto rnd = random_seq();

  SUBCASE("empty trigger always fires") {
    CHECK(sim::trigger_holds({}, wab, normal));
    CHECK(sim::trigger_holds({}, rnd, net));
  }
  SUBCASE("context condition") {
    sim::Trigger t;
    t.context = sim::ContextKind::network_fail;
    CHECK(sim::trigger_holds(t, wab, net));
    CHECK_FALSE(sim::trigger_holds(t, wab, normal));
  }
  SUBCASE("input-kind condition") {
    sim::Trigger t;
    t.input = efg::InputKind::random;
    CHECK(sim::trigger_holds(t, rnd, normal));
    CHECK_FALSE(sim::trigger_holds(t, wab, normal));
  }
  SUBCASE("node condition needs a weighted path through the node") {
    sim::Trigger t;
    t.node = "B";
    CHECK(sim::trigger_holds(t, wab, normal));
    CHECK_FALSE(sim::trigger_holds(t, rnd, normal));
    efg::SequenceDescriptor root_only;
    root_only.kind = efg::InputKind::weighted;
    root_only.path = {"A"};
    CHECK_FALSE(sim::trigger_holds(t, root_only, normal));
  }
  SUBCASE("conjunction of conditions") {
    sim::Trigger t;
    t.context = sim::ContextKind::network_fail;
    t.node = "B";
    CHECK(sim::trigger_holds(t, wab, net));
    CHECK_FALSE(sim::trigger_holds(t, wab, normal));
    CHECK_FALSE(sim::trigger_holds(t, rnd, net));
  }
}

TEST_CASE("background defects cannot fire without a BACKGROUND stage") {
  sim::Trigger always;
  const auto app = make_app({defect(sim::DefectKind::background, 0.5, always)});
  const auto wab = weighted_ab();

  const auto with_bg = sim::triggered_defects(
      app, wab, sim::RunningContext::make(sim::ContextKind::normal));
  REQUIRE(with_bg.size() == 1);
  CHECK(with_bg[0].kind == sim::DefectKind::background);

  const auto without_bg = sim::triggered_defects(
      app, wab, sim::RunningContext::make(sim::ContextKind::non_background));
  CHECK(without_bg.empty());
}

TEST_CASE("defect kind helpers") {
  CHECK(sim::affected_stage(sim::DefectKind::unnecessary_workload) ==
        trace::Stage::execution);
  CHECK(sim::affected_stage(sim::DefectKind::excessively_frequent_ops) ==
        trace::Stage::execution);
  CHECK(sim::affected_stage(sim::DefectKind::background) ==
        trace::Stage::background);
  CHECK(sim::affected_stage(sim::DefectKind::no_sleep) ==
        trace::Stage::screen_off);
  CHECK(sim::defect_kind_from_string("no_sleep") == sim::DefectKind::no_sleep);
  CHECK_FALSE(sim::defect_kind_from_string("gremlin").has_value());
}

TEST_CASE("clean case reproduces the baselines exactly") {
  sim::Simulator simu(short_params());
  const auto tc = simu.run_case(
      make_app(), weighted_ab(),
      sim::RunningContext::make(sim::ContextKind::normal), 5);

  CHECK(tc.app == "fixture");
  CHECK(tc.triggered.empty());
  REQUIRE(tc.staged.spans.size() == 5);
  const std::array<double, 5> expect = {300.0, 1000.0, 1500.0, 1000.0, 300.0};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(trace::mean_power(tc.staged, trace::kStageOrder[i]) ==
          doctest::Approx(expect[i]).epsilon(1e-12));
  }
  // Stage boundaries follow the configured durations back to back.
  const auto& b = tc.staged.markers.boundaries;
  REQUIRE(b.size() == 5);
  CHECK(b[0].start_ms == 0);
  CHECK(b[1].start_ms == 2000);
  CHECK(b[2].start_ms == 4000);
  CHECK(b[3].start_ms == 20000);
  CHECK(b[4].start_ms == 23000);
  CHECK(tc.staged.trace.samples.size() == (2000 + 2000 + 16000 + 3000 + 3000) / 10);
}

TEST_CASE("non-background context drops exactly the BACKGROUND stage") {
  sim::Simulator simu(short_params());
  const auto tc = simu.run_case(
      make_app(), weighted_ab(),
      sim::RunningContext::make(sim::ContextKind::non_background), 5);
  REQUIRE(tc.staged.spans.size() == 4);
  CHECK_FALSE(tc.staged.has(trace::Stage::background));
  CHECK(tc.staged.has(trace::Stage::screen_off));
  CHECK(tc.staged.markers.boundaries[3].start_ms == 20000);
}

TEST_CASE("case synthesis is a pure function of app, inputs and seed") {
  const auto app = make_app({}, 25.0);
  const auto ctx = sim::RunningContext::make(sim::ContextKind::normal);

  sim::Simulator a(short_params());
  sim::Simulator b(short_params());
  const auto t1 = a.run_case(app, weighted_ab(), ctx, 77);
  const auto t2 = b.run_case(app, weighted_ab(), ctx, 77);
  REQUIRE(t1.staged.trace.samples.size() == t2.staged.trace.samples.size());
  for (std::size_t i = 0; i < t1.staged.trace.samples.size(); ++i) {
    REQUIRE(t1.staged.trace.samples[i].t_ms == t2.staged.trace.samples[i].t_ms);
    REQUIRE(t1.staged.trace.samples[i].p_mw == t2.staged.trace.samples[i].p_mw);
  }

  const auto t3 = a.run_case(app, weighted_ab(), ctx, 78);
  bool any_diff = false;
  for (std::size_t i = 0; i < t1.staged.trace.samples.size(); ++i) {
    if (t1.staged.trace.samples[i].p_mw != t3.staged.trace.samples[i].p_mw) {
      any_diff = true;
      break;
    }
  }
  CHECK(any_diff);
}

TEST_CASE("run_case validates its inputs") {
  sim::Simulator simu(short_params());
  const auto ctx = sim::RunningContext::make(sim::ContextKind::normal);

  SUBCASE("weighted sequence must walk the graph") {
    efg::SequenceDescriptor bad;
    bad.kind = efg::InputKind::weighted;
    bad.path = {"A", "C"};  // no such edge
    try {
      (void)simu.run_case(make_app(), bad, ctx, 1);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::path);
    }
  }
  SUBCASE("random sequence needs a positive length") {
    CHECK_THROWS_AS((void)simu.run_case(make_app(), random_seq(3, 0), ctx, 1),
                    Error);
  }
  SUBCASE("bad app model") {
    auto app = make_app();
    app.baseline_mw[1] = 200.0;  // IDLE below PRE-OFF
    CHECK_THROWS_AS((void)simu.run_case(app, weighted_ab(), ctx, 1), Error);
  }
  SUBCASE("bad sim params") {
    sim::SimParams p;
    p.stage_duration_ms[0] = 50;  // under the minimum sample count
    CHECK_THROWS_AS(sim::Simulator{p}, Error);
    sim::SimParams q;
    q.efo_duty = 1.0;
    CHECK_THROWS_AS(sim::Simulator{q}, Error);
  }
}

TEST_CASE("unnecessary workload inflates EXECUTION multiplicatively") {
  sim::Trigger on_net;
  on_net.context = sim::ContextKind::network_fail;
  const auto app = make_app(
      {defect(sim::DefectKind::unnecessary_workload, 0.25, on_net)});
  sim::Simulator simu(short_params());

  const auto hot = simu.run_case(
      app, weighted_ab(), sim::RunningContext::make(sim::ContextKind::network_fail),
      3);
  REQUIRE(hot.triggered.size() == 1);
  CHECK(trace::mean_power(hot.staged, trace::Stage::execution) ==
        doctest::Approx(1500.0 * 1.25).epsilon(1e-12));
  // Other stages are untouched.
  CHECK(trace::mean_power(hot.staged, trace::Stage::idle) ==
        doctest::Approx(1000.0).epsilon(1e-12));

  simu.reset();
  const auto cold = simu.run_case(
      app, weighted_ab(), sim::RunningContext::make(sim::ContextKind::normal), 3);
  CHECK(cold.triggered.empty());
  CHECK(trace::mean_power(cold.staged, trace::Stage::execution) ==
        doctest::Approx(1500.0).epsilon(1e-12));
}

TEST_CASE("background and no-sleep defects inflate their stages") {
  const auto app = make_app({defect(sim::DefectKind::background, 0.5),
                             defect(sim::DefectKind::no_sleep, 2.0)});
  sim::Simulator simu(short_params());
  const auto tc = simu.run_case(
      app, weighted_ab(), sim::RunningContext::make(sim::ContextKind::normal), 4);
  REQUIRE(tc.triggered.size() == 2);
  CHECK(trace::mean_power(tc.staged, trace::Stage::background) ==
        doctest::Approx(1000.0 * 1.5).epsilon(1e-12));
  CHECK(trace::mean_power(tc.staged, trace::Stage::screen_off) ==
        doctest::Approx(300.0 * 3.0).epsilon(1e-12));
  CHECK(trace::mean_power(tc.staged, trace::Stage::execution) ==
        doctest::Approx(1500.0).epsilon(1e-12));
}

TEST_CASE("frequent-ops bursts hit the target mean and read as CHPPs") {
  sim::SimParams p;
  p.stage_duration_ms = {2000, 2000, 60000, 3000, 3000};
  const auto app = make_app(
      {defect(sim::DefectKind::excessively_frequent_ops, 0.6)});
  sim::Simulator simu(p);
  const auto tc = simu.run_case(
      app, weighted_ab(), sim::RunningContext::make(sim::ContextKind::normal), 6);

  // The burst scaling lands the stage mean exactly on base * (1 + m).
  CHECK(trace::mean_power(tc.staged, trace::Stage::execution) ==
        doctest::Approx(1500.0 * 1.6).epsilon(1e-9));

  // 60 s of an 8 s square wave at duty 0.5: eight on-windows, every one a
  // CHPP at a threshold between the floor and the burst level.
  const auto fv = trace::features(tc.staged, {2000.0, 2000});
  CHECK(fv.n_chpp == 8);
  CHECK(fv.l_chpp_ms == doctest::Approx(8 * 4000.0));
  CHECK(fv.mu_chpp_mw > fv.mu_exe_mw);
  // Off-phase samples sit at the flat level.
  const auto* span = tc.staged.span(trace::Stage::execution);
  REQUIRE(span != nullptr);
  double lowest = 1e18;
  for (std::size_t i = span->begin; i < span->end; ++i) {
    lowest = std::min(lowest, tc.staged.trace.samples[i].p_mw);
  }
  CHECK(lowest == doctest::Approx(1500.0).epsilon(1e-12));
}

TEST_CASE("workload defects compose multiplicatively") {
  const auto app = make_app(
      {defect(sim::DefectKind::unnecessary_workload, 0.25),
       defect(sim::DefectKind::excessively_frequent_ops, 0.5)});
  sim::Simulator simu(short_params());
  const auto tc = simu.run_case(
      app, weighted_ab(), sim::RunningContext::make(sim::ContextKind::normal), 7);
  CHECK(trace::mean_power(tc.staged, trace::Stage::execution) ==
        doctest::Approx(1500.0 * 1.25 * 1.5).epsilon(1e-9));
}

TEST_CASE("sticky defects leave residual power until reset") {
  sim::Trigger on_net;
  on_net.context = sim::ContextKind::network_fail;
  const auto app = make_app(
      {defect(sim::DefectKind::no_sleep, 2.0, on_net, /*sticky=*/true)});
  sim::Simulator simu(short_params());
  const auto normal = sim::RunningContext::make(sim::ContextKind::normal);
  const auto net = sim::RunningContext::make(sim::ContextKind::network_fail);

  // Untriggered first: nothing sticks.
  const auto before = simu.run_case(app, weighted_ab(), normal, 1);
  CHECK(before.triggered.empty());
  CHECK(trace::mean_power(before.staged, trace::Stage::screen_off) ==
        doctest::Approx(300.0).epsilon(1e-12));

  // Triggered: inflated now, residual afterwards.
  const auto hit = simu.run_case(app, weighted_ab(), net, 2);
  REQUIRE(hit.triggered.size() == 1);
  CHECK(trace::mean_power(hit.staged, trace::Stage::screen_off) ==
        doctest::Approx(900.0).epsilon(1e-12));

  // Residual contaminates the next untriggered case: 300 + 300*2.0*0.5.
  const auto after = simu.run_case(app, weighted_ab(), normal, 3);
  CHECK(after.triggered.empty());
  CHECK(trace::mean_power(after.staged, trace::Stage::screen_off) ==
        doctest::Approx(600.0).epsilon(1e-12));

  simu.reset();
  const auto clean = simu.run_case(app, weighted_ab(), normal, 4);
  CHECK(trace::mean_power(clean.staged, trace::Stage::screen_off) ==
        doctest::Approx(300.0).epsilon(1e-12));
}

TEST_CASE("OS noise only touches the EXECUTION stage") {
  sim::SimParams p = short_params();
  p.os_noise.enabled = true;
  p.os_noise.events_per_minute = 40.0;
  p.os_noise.min_amplitude_mw = 500.0;
  p.os_noise.max_amplitude_mw = 500.0;
  p.os_noise.min_duration_ms = 400;
  p.os_noise.max_duration_ms = 400;
  sim::Simulator simu(p);
  const auto tc = simu.run_case(
      make_app(), weighted_ab(),
      sim::RunningContext::make(sim::ContextKind::normal), 11);

  const std::array<double, 5> base = {300.0, 1000.0, 1500.0, 1000.0, 300.0};
  for (trace::Stage s : {trace::Stage::pre_off, trace::Stage::idle,
                         trace::Stage::background, trace::Stage::screen_off}) {
    const auto* span = tc.staged.span(s);
    REQUIRE(span != nullptr);
    for (std::size_t i = span->begin; i < span->end; ++i) {
      REQUIRE(tc.staged.trace.samples[i].p_mw ==
              base[static_cast<std::size_t>(s)]);
    }
  }
  // EXECUTION samples sit at 1500 plus a whole number of 500 mW excursions,
  // at least one of them above the flat level.
  const auto* exe = tc.staged.span(trace::Stage::execution);
  REQUIRE(exe != nullptr);
  double peak = 0.0;
  for (std::size_t i = exe->begin; i < exe->end; ++i) {
    const double p = tc.staged.trace.samples[i].p_mw;
    peak = std::max(peak, p);
    const double k = (p - 1500.0) / 500.0;
    REQUIRE(k == std::floor(k));
    REQUIRE(k >= 0.0);
  }
  CHECK(peak >= 2000.0);
}

TEST_CASE("fleet generation is deterministic and follows the rotation") {
  sim::FleetConfig cfg;
  cfg.n_apps = 8;
  cfg.defect_prevalence = 0.5;
  cfg.seed = 7;

  const auto fleet = sim::generate_fleet(cfg);
  REQUIRE(fleet.size() == 8);

  // Naming, categories, EFG sizing.
  CHECK(fleet[0].name == "app-000");
  CHECK(fleet[7].name == "app-007");
  for (int i = 0; i < 8; ++i) {
    CHECK(fleet[static_cast<std::size_t>(i)].category ==
          cfg.categories[static_cast<std::size_t>(i) % 4]);
    const auto nn = fleet[static_cast<std::size_t>(i)].efg.nodes().size();
    CHECK(nn >= 4);
    CHECK(nn <= 8);
  }

  // Exactly half defective, kinds rotating over the defective apps in index
  // order, magnitudes inside the per-kind ranges.
  std::vector<const sim::AppModel*> defective;
  for (const auto& app : fleet) {
    if (!app.defects.empty()) defective.push_back(&app);
  }
  REQUIRE(defective.size() == 4);
  const std::array<sim::DefectKind, 4> rotation = {
      sim::DefectKind::unnecessary_workload,
      sim::DefectKind::excessively_frequent_ops, sim::DefectKind::background,
      sim::DefectKind::no_sleep};
  for (std::size_t i = 0; i < 4; ++i) {
    REQUIRE(defective[i]->defects.size() == 1);
    const auto& d = defective[i]->defects[0];
    CHECK(d.kind == rotation[i]);
    if (sim::affected_stage(d.kind) == trace::Stage::execution) {
      CHECK(d.magnitude >= cfg.execution_magnitude.min);
      CHECK(d.magnitude <= cfg.execution_magnitude.max);
      REQUIRE(d.trigger.context.has_value());
      const bool known = *d.trigger.context == sim::ContextKind::network_fail ||
                         *d.trigger.context == sim::ContextKind::flight_mode;
      CHECK(known);
    } else {
      CHECK_FALSE(d.trigger.context.has_value());
      const auto& range = d.kind == sim::DefectKind::background
                              ? cfg.background_magnitude
                              : cfg.nosleep_magnitude;
      CHECK(d.magnitude >= range.min);
      CHECK(d.magnitude <= range.max);
    }
  }

  // Same config, same fleet.
  const auto again = sim::generate_fleet(cfg);
  REQUIRE(again.size() == fleet.size());
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    CHECK(again[i].name == fleet[i].name);
    CHECK(again[i].efg.nodes() == fleet[i].efg.nodes());
    REQUIRE(again[i].defects.size() == fleet[i].defects.size());
    for (std::size_t d = 0; d < fleet[i].defects.size(); ++d) {
      CHECK(again[i].defects[d].kind == fleet[i].defects[d].kind);
      CHECK(again[i].defects[d].magnitude == fleet[i].defects[d].magnitude);
    }
  }
}

TEST_CASE("fleet prevalence extremes and pinning") {
  sim::FleetConfig cfg;
  cfg.n_apps = 6;
  cfg.seed = 3;

  SUBCASE("prevalence 0 means no defects") {
    cfg.defect_prevalence = 0.0;
    for (const auto& app : sim::generate_fleet(cfg)) {
      CHECK(app.defects.empty());
    }
  }
  SUBCASE("prevalence 1 means all defective") {
    cfg.defect_prevalence = 1.0;
    for (const auto& app : sim::generate_fleet(cfg)) {
      CHECK(app.defects.size() == 1);
    }
  }
  SUBCASE("pinned trigger context applies to every defect") {
    cfg.defect_prevalence = 1.0;
    cfg.pin_trigger_context = sim::ContextKind::network_fail;
    for (const auto& app : sim::generate_fleet(cfg)) {
      REQUIRE(app.defects.size() == 1);
      CHECK(app.defects[0].trigger.context == sim::ContextKind::network_fail);
    }
  }
}

TEST_CASE("fleet config validation") {
  sim::FleetConfig cfg;
  SUBCASE("defaults pass") { CHECK_NOTHROW(cfg.validate()); }
  SUBCASE("n_apps") {
    cfg.n_apps = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
  }
  SUBCASE("categories") {
    cfg.categories.clear();
    CHECK_THROWS_AS(cfg.validate(), Error);
  }
  SUBCASE("prevalence") {
    cfg.defect_prevalence = 1.5;
    CHECK_THROWS_AS(cfg.validate(), Error);
  }
  SUBCASE("magnitude range") {
    cfg.execution_magnitude = {0.0, 0.5};
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.execution_magnitude = {0.5, 0.2};
    CHECK_THROWS_AS(cfg.validate(), Error);
  }
  SUBCASE("baseline ordering") {
    cfg.baseline_mw = {1000.0, 500.0, 1500.0, 1000.0, 300.0};
    CHECK_THROWS_AS(cfg.validate(), Error);
  }
  SUBCASE("efg node range") {
    cfg.efg_min_nodes = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.efg_min_nodes = 9;
    cfg.efg_max_nodes = 8;
    CHECK_THROWS_AS(cfg.validate(), Error);
  }
}

TEST_CASE("fleet spec files") {
  ScratchDir dir("fleet");

  SUBCASE("generator form") {
    const auto path = dir.path() / "fleet.json";
    std::ofstream(path) << R"({"generator": {
      "n_apps": 5, "defect_prevalence": 0.4, "seed": 11,
      "categories": ["a", "b"],
      "execution_magnitude": [0.3, 0.9],
      "pin_trigger_context": "flight_mode",
      "efg_min_nodes": 4, "efg_max_nodes": 6
    }})";
    const auto fleet = sim::load_fleet_file(path);
    REQUIRE(fleet.size() == 5);
    CHECK(fleet[0].category == "a");
    CHECK(fleet[1].category == "b");
    int defects = 0;
    for (const auto& app : fleet) {
      for (const auto& d : app.defects) {
        ++defects;
        CHECK(d.trigger.context == sim::ContextKind::flight_mode);
      }
    }
    CHECK(defects == 2);  // llround(0.4 * 5)
  }

  SUBCASE("config text parser") {
    const auto cfg = sim::fleet_config_from_json_text(
        R"({"generator": {"n_apps": 3, "noise_sd_mw": 12.5,
             "baseline_mw": [100, 900, 1400, 800, 250],
             "background_magnitude": [0.5, 0.6]}})");
    CHECK(cfg.n_apps == 3);
    CHECK(cfg.noise_sd_mw == 12.5);
    CHECK(cfg.baseline_mw[0] == 100.0);
    CHECK(cfg.background_magnitude.min == 0.5);
    CHECK(cfg.background_magnitude.max == 0.6);
  }

  SUBCASE("explicit apps form") {
    const auto efg_path = dir.path() / "app.efg";
    efg::write_efg_file(chain_efg(), efg_path);
    const auto path = dir.path() / "fleet.json";
    std::ofstream(path) << R"({"apps": [{
      "name": "alpha", "category": "media", "efg": "app.efg",
      "baseline_mw": [200, 800, 1200, 700, 200], "noise_sd_mw": 5,
      "defects": [{"kind": "no_sleep", "magnitude": 1.5, "sticky": true,
                   "trigger": {"context": "normal", "node": "B"}}]
    }]})";
    const auto fleet = sim::load_fleet_file(path);
    REQUIRE(fleet.size() == 1);
    CHECK(fleet[0].name == "alpha");
    CHECK(fleet[0].efg.nodes().size() == 3);
    CHECK(fleet[0].baseline_mw[2] == 1200.0);
    REQUIRE(fleet[0].defects.size() == 1);
    const auto& d = fleet[0].defects[0];
    CHECK(d.kind == sim::DefectKind::no_sleep);
    CHECK(d.magnitude == 1.5);
    CHECK(d.sticky);
    CHECK(d.trigger.context == sim::ContextKind::normal);
    CHECK(d.trigger.node == "B");
  }

  SUBCASE("rejects malformed specs") {
    const auto check_throws = [&](const std::string& text, Errc want) {
      const auto path = dir.path() / "bad.json";
      std::ofstream(path) << text;
      try {
        (void)sim::load_fleet_file(path);
        FAIL("expected an error for: ", text);
      } catch (const Error& e) {
        CHECK(e.code() == want);
      }
    };
    check_throws(R"({"nothing": true})", Errc::config);
    check_throws(R"({"apps": []})", Errc::config);
    check_throws(R"({"apps": [{"category": "x"}]})", Errc::parse);
    check_throws(R"({"generator": {"pin_trigger_context": "mars"}})",
                 Errc::parse);
    check_throws(R"({"generator": {"n_apps": 0}})", Errc::config);
    check_throws("not json at all", Errc::parse);
  }
}
