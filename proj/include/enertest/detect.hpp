// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0
//
// Issue detection. Execution issues are DBSCAN outliers over per-category
// CHPP feature vectors; background and no-sleep issues come from stage
// dissimilarity thresholds. Waste is always the relative excess of the
// suspect stage's mean power over its baseline, in percent.

#ifndef ENERTEST_DETECT_HPP
#define ENERTEST_DETECT_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "enertest/efg.hpp"
#include "enertest/error.hpp"
#include "enertest/trace.hpp"

namespace enertest::detect {

/// DBSCAN parameters in z-normalized feature space.
struct DbscanParams {
  double eps = 1.5;
  int min_pts = 5;

  void validate() const;
};

enum class PointKind { core, border, outlier };

struct PointLabel {
  PointKind kind = PointKind::outlier;
  int cluster = -1;  // -1 for outliers
};

struct DbscanResult {
  std::vector<PointLabel> labels;
  std::vector<std::size_t> dropped_dims;  // zero-variance dimensions
};

/// Density labels over 4-d feature vectors.
///
/// Distances are Euclidean over per-dimension z-scores; a dimension whose
/// values are all identical carries no information and is dropped from the
/// distance (reported in dropped_dims). A point counts as its own neighbor
/// and the eps radius is inclusive. Labels follow the three rules:
///   core    - at least min_pts neighbors within eps
///   border  - fewer, but a neighbor of a core or border point
///   outlier - neither
/// Clusters are numbered by the lowest-index core they contain, in index
/// order. Border points attach in waves: each wave assigns, to every still
/// unassigned non-core point with an assigned neighbor, the cluster of its
/// lowest-index assigned neighbor, all against the previous wave's snapshot.
DbscanResult dbscan(const std::vector<std::array<double, 4>>& points,
                    const DbscanParams& params);

/// Detection cutoffs: stage dissimilarity must exceed the per-kind ratio and
/// any record must reach min_waste_report percent waste.
struct DetectionThresholds {
  double background = 0.40;
  double nosleep = 0.50;
  double min_waste_report = 10.0;

  void validate() const;
};

enum class IssueKind { execution, background, nosleep };

std::string_view to_string(IssueKind kind) noexcept;
std::optional<IssueKind> issue_kind_from_string(std::string_view name) noexcept;

/// The stage a defect of the given issue kind inflates.
trace::Stage affected_stage(IssueKind kind) noexcept;

/// Identity of a test case as carried into issue records.
struct CaseRef {
  std::string id;
  std::string app;
  efg::SequenceDescriptor sequence;
  std::string context;
  std::uint64_t seed = 0;
  std::string trace_path;  // relative to the campaign output directory
};

/// One detected issue with its evidence. For execution issues the evidence
/// is the feature vector; for the stage detectors it is the dissimilarity
/// and the two stage means (e_x suspect, e_n baseline).
struct EnergyIssueRecord {
  IssueKind kind = IssueKind::execution;
  CaseRef case_ref;
  double waste_percent = 0.0;
  trace::FeatureVector features;
  double dissimilarity = 0.0;
  double e_x_mw = 0.0;
  double e_n_mw = 0.0;
};

/// A category corpus entry for execution-issue clustering.
struct ExecutionCase {
  CaseRef ref;
  trace::FeatureVector features;
};

/// DBSCAN outlier detection over one app category.
///
/// Flags outlier-labeled cases whose mu_exe exceeds the category mean (cheap
/// outliers are not energy issues). Waste compares the case's mu_exe with
/// the mean mu_exe of non-outlier cases; records below min_waste_report are
/// suppressed. Throws Errc::insufficient_corpus when the category holds
/// fewer than min_pts cases.
std::vector<EnergyIssueRecord> detect_execution(
    const std::vector<ExecutionCase>& cases, const DbscanParams& params,
    const DetectionThresholds& thresholds);

/// Stage-detector outcome, turned into an EnergyIssueRecord by the caller.
struct StageFinding {
  double waste_percent = 0.0;
  double dissimilarity = 0.0;
  double e_x_mw = 0.0;
  double e_n_mw = 0.0;
};

/// BACKGROUND vs IDLE. Returns nothing for traces without a BACKGROUND
/// stage (non-background context) or when the dissimilarity stays within
/// the threshold.
std::optional<StageFinding> detect_background(
    const trace::StagedTrace& staged, const DetectionThresholds& thresholds);

/// SCREEN-OFF vs PRE-OFF, same contract with the nosleep threshold.
std::optional<StageFinding> detect_nosleep(
    const trace::StagedTrace& staged, const DetectionThresholds& thresholds);

/// Ground truth of one case for scoring: which issue kinds its triggered
/// defects cover, indexed by IssueKind.
struct TruthCase {
  std::string id;
  std::array<bool, 3> truth = {false, false, false};
};

struct KindScore {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  double precision = 1.0;  // 1.0 by convention when no records (flagged)
  double recall = 1.0;     // 1.0 by convention when no positives (flagged)
  bool vacuous_precision = false;
  bool vacuous_recall = false;
};

struct Score {
  std::array<KindScore, 3> by_kind;  // indexed by IssueKind

  const KindScore& of(IssueKind kind) const noexcept {
    return by_kind[static_cast<std::size_t>(kind)];
  }
};

/// Precision/recall per kind. A record is a true positive iff its case's
/// ground truth covers the record's kind; a positive case without a record
/// of that kind is a false negative. Records referencing unknown case ids
/// throw Errc::invalid_argument.
Score score_against_ground_truth(const std::vector<EnergyIssueRecord>& records,
                                 const std::vector<TruthCase>& cases);

}  // namespace enertest::detect

#endif  // ENERTEST_DETECT_HPP
