// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command line front end. Talks to the library exclusively through the
// public C API in enertest.h.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "enertest.h"

namespace {

int exit_code(et_status status) {
  switch (status) {
    case ET_OK:
      return 0;
    case ET_ERR_CONFIG:
    case ET_ERR_PARSE:
    case ET_ERR_INVALID_ARGUMENT:
      return 2;
    default:
      return 1;
  }
}

int report_failure(et_status status) {
  std::fprintf(stderr, "error: %s\n", et_last_error());
  return exit_code(status);
}

int cmd_run(const std::string& config_path, std::uint64_t seed,
            std::int64_t budget, const std::string& out_dir, int workers,
            bool emit_plots) {
  et_campaign_result* result = nullptr;
  const et_status status =
      et_campaign_run(config_path.c_str(), seed, budget, out_dir.c_str(),
                      workers, emit_plots ? 1 : 0, &result);
  if (status != ET_OK) return report_failure(status);
  std::int64_t cases = 0;
  std::int64_t events = 0;
  std::size_t issues = 0;
  et_campaign_cases_run(result, &cases);
  et_campaign_detection_events(result, &events);
  et_campaign_issue_count(result, &issues);
  std::printf("ran %" PRId64 " cases: %zu issues, %" PRId64
              " detection events\n",
              cases, issues, events);
  std::printf("database written to %s\n", out_dir.c_str());
  et_campaign_result_free(result);
  return 0;
}

int cmd_report(const std::string& db_dir) {
  const et_status status = et_report_generate(db_dir.c_str());
  if (status != ET_OK) return report_failure(status);
  std::printf("report written to %s/report\n", db_dir.c_str());
  return 0;
}

int cmd_score(const std::string& db_dir, const std::string& fleet_path) {
  et_score* score = nullptr;
  const et_status status =
      et_score_compute(db_dir.c_str(), fleet_path.c_str(), &score);
  if (status != ET_OK) return report_failure(status);
  static const char* kKinds[] = {"execution", "background", "nosleep"};
  for (int kind = 0; kind < 3; ++kind) {
    double precision = 0.0;
    double recall = 0.0;
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    et_score_precision(score, kind, &precision);
    et_score_recall(score, kind, &recall);
    et_score_counts(score, kind, &tp, &fp, &fn);
    std::printf("%-10s precision %.4f recall %.4f (tp %" PRId64 " fp %" PRId64
                " fn %" PRId64 ")\n",
                kKinds[kind], precision, recall, tp, fp, fn);
  }
  std::printf("score written to %s/score.json\n", db_dir.c_str());
  et_score_free(score);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"enertest: energy-issue testing over a simulated app fleet"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 1;
  std::int64_t budget = 0;
  int workers = 1;
  bool emit_plots = false;
  CLI::App* run = app.add_subcommand("run", "Run a testing campaign");
  run->add_option("--config", config_path, "Campaign config JSON file")
      ->required();
  run->add_option("--seed", seed, "Campaign seed")->required();
  run->add_option("--budget", budget, "Number of test cases to run")
      ->required();
  run->add_option("--out", out_dir, "Database directory to create")
      ->required();
  run->add_option("--workers", workers, "Parallel simulation workers");
  run->add_flag("--emit-plots", emit_plots,
                "Also write downsampled plot CSVs for issue cases");

  std::string report_db;
  CLI::App* report =
      app.add_subcommand("report", "Render a report from a campaign database");
  report->add_option("--db", report_db, "Campaign database directory")
      ->required();

  std::string score_db;
  std::string fleet_path;
  CLI::App* score = app.add_subcommand(
      "score", "Score a campaign database against fleet ground truth");
  score->add_option("--db", score_db, "Campaign database directory")
      ->required();
  score->add_option("--fleet", fleet_path, "Fleet spec the campaign used")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return cmd_run(config_path, seed, budget, out_dir, workers, emit_plots);
  }
  if (report->parsed()) {
    return cmd_report(report_db);
  }
  return cmd_score(score_db, fleet_path);
}
