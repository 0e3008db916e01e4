// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0
//
// Campaign orchestration: loop over test cases (reset, steer, pick a
// sequence, simulate, detect, update steering), persist the issue database
// and summary, then generate reports and score against ground truth.

#ifndef ENERTEST_CAMPAIGN_HPP
#define ENERTEST_CAMPAIGN_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "enertest/detect.hpp"
#include "enertest/sim.hpp"
#include "enertest/steer.hpp"

namespace enertest::campaign {

/// Budget in simulated cases (default) or wall-clock seconds. A case budget
/// of 0 yields an empty but valid campaign.
struct BudgetConfig {
  std::int64_t cases = 100;
  std::optional<double> wall_clock_seconds;

  void validate() const;
};

/// Input sequence generation settings shared by all apps.
struct SequenceConfig {
  double alpha = 0.5;
  double beta = 0.5;
  std::size_t max_len = 12;
  std::size_t max_paths = 500;
  std::size_t random_length = 100;

  void validate() const;
};

/// CHPP extraction policy: the power threshold is idle_factor times the
/// case's own IDLE mean, making it device-model independent.
struct ChppPolicy {
  double idle_factor = 2.5;
  std::int64_t min_duration_ms = 2000;

  void validate() const;
};

struct DetectionConfig {
  detect::DetectionThresholds thresholds;
  detect::DbscanParams dbscan;
  ChppPolicy chpp;
  /// Re-cluster a category during the campaign every rebatch_interval new
  /// cases once it holds min_pts cases. These incremental passes feed
  /// steering; the end-of-campaign pass is authoritative for the database.
  std::int64_t rebatch_interval = 25;
  bool incremental_pass = true;
  bool final_pass = true;

  void validate() const;
};

struct CampaignConfig {
  std::filesystem::path fleet_path;
  BudgetConfig budget;
  std::uint64_t seed = 1;
  int workers = 1;
  DetectionConfig detection;
  steer::SteeringConfig steering;
  SequenceConfig sequences;
  sim::SimParams sim_params;
  std::filesystem::path out_dir;
  bool emit_plots = false;

  void validate() const;
};

/// Campaign config file: JSON mirroring CampaignConfig (fleet, budget, seed,
/// workers, detection, steering, sequences, sim). Relative fleet paths are
/// resolved against the config file's directory; seed/budget/out/workers are
/// usually overridden from the command line.
CampaignConfig load_campaign_config(const std::filesystem::path& path);

/// One deduplicated issue. Identity is (app, kind, stage, context); further
/// hits of the same identity increment hit_count and extend case_ids. record
/// holds the first hit's evidence.
struct IssueEntry {
  detect::EnergyIssueRecord record;
  std::int64_t hit_count = 1;
  std::vector<std::string> case_ids;
  std::int64_t inserted_at_case = 0;  // case counter when first seen
};

struct KindSummary {
  std::int64_t count = 0;
  double waste_mean = 0.0;
  double waste_max = 0.0;
};

struct CampaignResult {
  std::vector<IssueEntry> issues;
  std::int64_t cases_run = 0;
  std::size_t detection_events = 0;  // equals the steering audit log length
  steer::SteeringState final_steering;
  std::vector<std::string> categories_skipped;  // fewer cases than min_pts
  std::filesystem::path out_dir;
};

/// Runs the full loop and persists the database under config.out_dir:
/// traces/, cases.jsonl, issues.json, summary.json, steering_log.jsonl,
/// config_used.json and optionally plots/. Single-worker runs are bit-exact
/// reproducible for a fixed seed; multi-worker runs are reproducible for a
/// fixed (seed, workers) pair because steering sees detections batch by
/// batch. Configuration errors surface before any case runs.
CampaignResult run_campaign(const CampaignConfig& config);

/// Reads a campaign database directory and writes report/report.md plus one
/// plot-ready JSON per issue under report/issues/. Each issue shows the
/// sequence and context descriptor, the trace reference with a downsampled
/// series, the evidence (features or dissimilarity, waste) and the fixed
/// rationale for the rule that fired.
void generate_report(const std::filesystem::path& db_dir);

/// Scores a campaign database against the ground truth of its fleet spec:
/// regenerates the fleet, recomputes every case's triggered defects,
/// cross-checks the stored truth (mismatch is a config error) and computes
/// precision/recall per kind. Writes score.json into the database directory.
detect::Score score_database(const std::filesystem::path& db_dir,
                             const std::filesystem::path& fleet_path);

}  // namespace enertest::campaign

#endif  // ENERTEST_CAMPAIGN_HPP
