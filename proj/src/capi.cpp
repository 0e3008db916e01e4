// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0

#include "enertest.h"

#include <exception>
#include <string>
#include <utility>

#include "enertest/campaign.hpp"
#include "enertest/detect.hpp"
#include "enertest/error.hpp"
#include "enertest/trace.hpp"

struct et_trace {
  enertest::trace::StagedTrace staged;
};

struct et_campaign_result {
  enertest::campaign::CampaignResult result;
};

struct et_score {
  enertest::detect::Score score;
};

namespace {

thread_local std::string g_last_error{"no error"};

et_status status_from(enertest::Errc code) {
  using enertest::Errc;
  switch (code) {
    case Errc::io: return ET_ERR_IO;
    case Errc::parse: return ET_ERR_PARSE;
    case Errc::config: return ET_ERR_CONFIG;
    case Errc::bounds: return ET_ERR_BOUNDS;
    case Errc::order: return ET_ERR_ORDER;
    case Errc::stage_missing: return ET_ERR_STAGE_MISSING;
    case Errc::degenerate_baseline: return ET_ERR_DEGENERATE_BASELINE;
    case Errc::insufficient_corpus: return ET_ERR_INSUFFICIENT_CORPUS;
    case Errc::path: return ET_ERR_PATH;
    case Errc::index: return ET_ERR_INDEX;
    case Errc::invalid_argument: return ET_ERR_INVALID_ARGUMENT;
  }
  return ET_ERR_INTERNAL;
}

et_status fail(et_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename Fn>
et_status guarded(Fn&& fn) {
  try {
    fn();
    return ET_OK;
  } catch (const enertest::Error& e) {
    return fail(status_from(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(ET_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(ET_ERR_INTERNAL, "unknown error");
  }
}

et_status require(bool ok, const char* what) {
  if (ok) return ET_OK;
  return fail(ET_ERR_INVALID_ARGUMENT, what);
}

const enertest::detect::KindScore* kind_score(const et_score* score,
                                              int kind) {
  if (score == nullptr || kind < 0 || kind > 2) return nullptr;
  return &score->score.of(static_cast<enertest::detect::IssueKind>(kind));
}

}  // namespace

extern "C" {

const char* et_last_error(void) { return g_last_error.c_str(); }

et_status et_trace_read_file(const char* path, et_trace** out) {
  if (et_status s = require(path && out, "path and out must be non-NULL"))
    return s;
  return guarded([&] {
    auto handle = new et_trace{enertest::trace::read_trace_file(path)};
    *out = handle;
  });
}

et_status et_trace_write_file(const et_trace* trace, const char* path) {
  if (et_status s = require(trace && path, "trace and path must be non-NULL"))
    return s;
  return guarded(
      [&] { enertest::trace::write_trace_file(trace->staged, path); });
}

void et_trace_free(et_trace* trace) { delete trace; }

et_status et_trace_sample_count(const et_trace* trace, size_t* out) {
  if (et_status s = require(trace && out, "trace and out must be non-NULL"))
    return s;
  *out = trace->staged.trace.samples.size();
  return ET_OK;
}

et_status et_trace_stage_count(const et_trace* trace, size_t* out) {
  if (et_status s = require(trace && out, "trace and out must be non-NULL"))
    return s;
  *out = trace->staged.markers.boundaries.size();
  return ET_OK;
}

et_status et_trace_stage_mean(const et_trace* trace, const char* stage,
                              double* out_mw) {
  if (et_status s = require(trace && stage && out_mw,
                            "trace, stage and out must be non-NULL"))
    return s;
  return guarded([&] {
    const auto parsed = enertest::trace::stage_from_string(stage);
    if (!parsed) {
      throw enertest::Error(enertest::Errc::invalid_argument,
                            std::string("unknown stage label '") + stage +
                                "'");
    }
    *out_mw = enertest::trace::mean_power(trace->staged, *parsed);
  });
}

et_status et_trace_features(const et_trace* trace, double threshold_mw,
                            int64_t min_duration_ms, double out[4]) {
  if (et_status s = require(trace && out, "trace and out must be non-NULL"))
    return s;
  return guarded([&] {
    const enertest::trace::ChppConfig cfg{threshold_mw, min_duration_ms};
    const auto f = enertest::trace::features(trace->staged, cfg);
    const auto values = f.as_array();
    for (int i = 0; i < 4; ++i) out[i] = values[static_cast<size_t>(i)];
  });
}

et_status et_energy_waste(double e_x_mw, double e_n_mw, double* out_percent) {
  if (et_status s = require(out_percent != nullptr, "out must be non-NULL"))
    return s;
  return guarded(
      [&] { *out_percent = enertest::trace::energy_waste(e_x_mw, e_n_mw); });
}

et_status et_dissimilarity(double e_a_mw, double e_b_mw, double* out) {
  if (et_status s = require(out != nullptr, "out must be non-NULL")) return s;
  return guarded(
      [&] { *out = enertest::trace::dissimilarity(e_a_mw, e_b_mw); });
}

et_status et_sequence_weight(int64_t s, int64_t c, double alpha, double beta,
                             double* out) {
  if (et_status st = require(out != nullptr, "out must be non-NULL"))
    return st;
  return guarded([&] {
    const enertest::efg::WeightConfig cfg{alpha, beta};
    cfg.validate();
    *out = enertest::efg::weight({s, c}, cfg);
  });
}

et_status et_campaign_run(const char* config_path, uint64_t seed,
                          int64_t budget_cases, const char* out_dir,
                          int workers, int emit_plots,
                          et_campaign_result** out) {
  if (et_status s = require(config_path && out_dir && out,
                            "config_path, out_dir and out must be non-NULL"))
    return s;
  return guarded([&] {
    enertest::campaign::CampaignConfig config =
        enertest::campaign::load_campaign_config(config_path);
    config.seed = seed;
    config.budget.cases = budget_cases;
    config.budget.wall_clock_seconds.reset();
    config.out_dir = out_dir;
    config.workers = workers;
    config.emit_plots = emit_plots != 0;
    auto handle =
        new et_campaign_result{enertest::campaign::run_campaign(config)};
    *out = handle;
  });
}

et_status et_campaign_cases_run(const et_campaign_result* result,
                                int64_t* out) {
  if (et_status s = require(result && out, "result and out must be non-NULL"))
    return s;
  *out = result->result.cases_run;
  return ET_OK;
}

et_status et_campaign_issue_count(const et_campaign_result* result,
                                  size_t* out) {
  if (et_status s = require(result && out, "result and out must be non-NULL"))
    return s;
  *out = result->result.issues.size();
  return ET_OK;
}

et_status et_campaign_detection_events(const et_campaign_result* result,
                                       int64_t* out) {
  if (et_status s = require(result && out, "result and out must be non-NULL"))
    return s;
  *out = result->result.detection_events;
  return ET_OK;
}

void et_campaign_result_free(et_campaign_result* result) { delete result; }

et_status et_report_generate(const char* db_dir) {
  if (et_status s = require(db_dir != nullptr, "db_dir must be non-NULL"))
    return s;
  return guarded([&] { enertest::campaign::generate_report(db_dir); });
}

et_status et_score_compute(const char* db_dir, const char* fleet_path,
                           et_score** out) {
  if (et_status s = require(db_dir && fleet_path && out,
                            "db_dir, fleet_path and out must be non-NULL"))
    return s;
  return guarded([&] {
    auto handle = new et_score{
        enertest::campaign::score_database(db_dir, fleet_path)};
    *out = handle;
  });
}

et_status et_score_precision(const et_score* score, int kind, double* out) {
  const auto* ks = kind_score(score, kind);
  if (ks == nullptr || out == nullptr) {
    return fail(ET_ERR_INVALID_ARGUMENT, "bad score handle, kind, or out");
  }
  *out = ks->precision;
  return ET_OK;
}

et_status et_score_recall(const et_score* score, int kind, double* out) {
  const auto* ks = kind_score(score, kind);
  if (ks == nullptr || out == nullptr) {
    return fail(ET_ERR_INVALID_ARGUMENT, "bad score handle, kind, or out");
  }
  *out = ks->recall;
  return ET_OK;
}

et_status et_score_counts(const et_score* score, int kind, int64_t* tp,
                          int64_t* fp, int64_t* fn) {
  const auto* ks = kind_score(score, kind);
  if (ks == nullptr || tp == nullptr || fp == nullptr || fn == nullptr) {
    return fail(ET_ERR_INVALID_ARGUMENT, "bad score handle, kind, or outs");
  }
  *tp = ks->tp;
  *fp = ks->fp;
  *fn = ks->fn;
  return ET_OK;
}

void et_score_free(et_score* score) { delete score; }

}  // extern "C"
