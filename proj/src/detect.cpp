// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0

#include "enertest/detect.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace enertest::detect {

void DbscanParams::validate() const {
  if (!(eps > 0.0) || min_pts < 1) {
    throw Error(Errc::config, "DBSCAN needs eps > 0 and min_pts >= 1");
  }
}

void DetectionThresholds::validate() const {
  if (!(background > 0.0) || !(nosleep > 0.0) || !(min_waste_report > 0.0)) {
    throw Error(Errc::config, "detection thresholds must be positive");
  }
}

std::string_view to_string(IssueKind kind) noexcept {
  switch (kind) {
    case IssueKind::execution: return "execution";
    case IssueKind::background: return "background";
    case IssueKind::nosleep: return "nosleep";
  }
  return "?";
}

std::optional<IssueKind> issue_kind_from_string(
    std::string_view name) noexcept {
  for (IssueKind k : {IssueKind::execution, IssueKind::background,
                      IssueKind::nosleep}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

trace::Stage affected_stage(IssueKind kind) noexcept {
  switch (kind) {
    case IssueKind::execution: return trace::Stage::execution;
    case IssueKind::background: return trace::Stage::background;
    case IssueKind::nosleep: return trace::Stage::screen_off;
  }
  return trace::Stage::execution;
}

namespace {

/// Per-dimension z-scores with zero-variance dimensions removed.
std::vector<std::vector<double>> normalize(
    const std::vector<std::array<double, 4>>& points,
    std::vector<std::size_t>& dropped_dims) {
  const std::size_t n = points.size();
  std::vector<std::size_t> kept;
  std::array<double, 4> mean{};
  std::array<double, 4> sd{};
  for (std::size_t d = 0; d < 4; ++d) {
    double lo = points[0][d];
    double hi = points[0][d];
    double sum = 0.0;
    for (const auto& p : points) {
      lo = std::min(lo, p[d]);
      hi = std::max(hi, p[d]);
      sum += p[d];
    }
    if (lo == hi) {
      dropped_dims.push_back(d);
      continue;
    }
    mean[d] = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& p : points) {
      const double dev = p[d] - mean[d];
      ss += dev * dev;
    }
    sd[d] = std::sqrt(ss / static_cast<double>(n));
    kept.push_back(d);
  }

  std::vector<std::vector<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].reserve(kept.size());
    for (std::size_t d : kept) {
      out[i].push_back((points[i][d] - mean[d]) / sd[d]);
    }
  }
  return out;
}

double distance2(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double dev = a[d] - b[d];
    acc += dev * dev;
  }
  return acc;
}

}  // namespace

DbscanResult dbscan(const std::vector<std::array<double, 4>>& points,
                    const DbscanParams& params) {
  params.validate();
  if (points.empty()) {
    return {};
  }
  const std::size_t n = points.size();

  DbscanResult result;
  const auto coords = normalize(points, result.dropped_dims);
  const double eps2 = params.eps * params.eps;

  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (distance2(coords[i], coords[j]) <= eps2) {
        neighbors[i].push_back(j);  // includes i itself
      }
    }
  }

  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    core[i] = neighbors[i].size() >= static_cast<std::size_t>(params.min_pts);
  }

  // Cluster cores by eps-connectivity, ids in order of first core index.
  std::vector<int> cluster(n, -1);
  int next_cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || cluster[i] != -1) continue;
    const int id = next_cluster++;
    std::vector<std::size_t> frontier{i};
    cluster[i] = id;
    while (!frontier.empty()) {
      const std::size_t at = frontier.back();
      frontier.pop_back();
      for (std::size_t nb : neighbors[at]) {
        if (core[nb] && cluster[nb] == -1) {
          cluster[nb] = id;
          frontier.push_back(nb);
        }
      }
    }
  }

  // Attach borders in waves against the previous wave's snapshot, each point
  // taking the cluster of its lowest-index assigned neighbor.
  std::vector<bool> assigned = core;
  for (;;) {
    std::vector<std::pair<std::size_t, int>> additions;
    for (std::size_t i = 0; i < n; ++i) {
      if (assigned[i]) continue;
      for (std::size_t nb : neighbors[i]) {
        if (assigned[nb]) {
          additions.emplace_back(i, cluster[nb]);
          break;  // neighbors are in index order, so this is the anchor
        }
      }
    }
    if (additions.empty()) break;
    for (const auto& [i, id] : additions) {
      assigned[i] = true;
      cluster[i] = id;
    }
  }

  result.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) {
      result.labels[i] = {PointKind::core, cluster[i]};
    } else if (assigned[i]) {
      result.labels[i] = {PointKind::border, cluster[i]};
    } else {
      result.labels[i] = {PointKind::outlier, -1};
    }
  }
  return result;
}

std::vector<EnergyIssueRecord> detect_execution(
    const std::vector<ExecutionCase>& cases, const DbscanParams& params,
    const DetectionThresholds& thresholds) {
  params.validate();
  thresholds.validate();
  if (cases.size() < static_cast<std::size_t>(params.min_pts)) {
    throw Error(Errc::insufficient_corpus,
                "category has " + std::to_string(cases.size()) +
                    " cases, need at least " + std::to_string(params.min_pts));
  }

  std::vector<std::array<double, 4>> points;
  points.reserve(cases.size());
  for (const ExecutionCase& c : cases) points.push_back(c.features.as_array());
  const DbscanResult clustered = dbscan(points, params);

  double category_sum = 0.0;
  double inlier_sum = 0.0;
  std::size_t inliers = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    category_sum += cases[i].features.mu_exe_mw;
    if (clustered.labels[i].kind != PointKind::outlier) {
      inlier_sum += cases[i].features.mu_exe_mw;
      ++inliers;
    }
  }
  const double category_mean =
      category_sum / static_cast<double>(cases.size());
  if (inliers == 0) return {};  // no normal crowd to compare against
  const double normal_mean = inlier_sum / static_cast<double>(inliers);

  std::vector<EnergyIssueRecord> records;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (clustered.labels[i].kind != PointKind::outlier) continue;
    const double mu = cases[i].features.mu_exe_mw;
    if (mu <= category_mean) continue;  // cheap outliers are not issues
    const double waste = trace::energy_waste(mu, normal_mean);
    if (waste < thresholds.min_waste_report) continue;
    EnergyIssueRecord rec;
    rec.kind = IssueKind::execution;
    rec.case_ref = cases[i].ref;
    rec.waste_percent = waste;
    rec.features = cases[i].features;
    rec.e_x_mw = mu;
    rec.e_n_mw = normal_mean;
    records.push_back(std::move(rec));
  }
  return records;
}

namespace {

std::optional<StageFinding> stage_detector(const trace::StagedTrace& staged,
                                           trace::Stage suspect,
                                           trace::Stage baseline,
                                           double threshold,
                                           double min_waste_report) {
  if (!staged.has(suspect)) return std::nullopt;
  StageFinding f;
  f.dissimilarity = trace::dissimilarity(staged, suspect, baseline);
  if (f.dissimilarity <= threshold) return std::nullopt;
  f.e_x_mw = trace::mean_power(staged, suspect);
  f.e_n_mw = trace::mean_power(staged, baseline);
  f.waste_percent = trace::energy_waste(f.e_x_mw, f.e_n_mw);
  if (f.waste_percent < min_waste_report) return std::nullopt;
  return f;
}

}  // namespace

std::optional<StageFinding> detect_background(
    const trace::StagedTrace& staged, const DetectionThresholds& thresholds) {
  thresholds.validate();
  return stage_detector(staged, trace::Stage::background, trace::Stage::idle,
                        thresholds.background, thresholds.min_waste_report);
}

std::optional<StageFinding> detect_nosleep(
    const trace::StagedTrace& staged, const DetectionThresholds& thresholds) {
  thresholds.validate();
  return stage_detector(staged, trace::Stage::screen_off,
                        trace::Stage::pre_off, thresholds.nosleep,
                        thresholds.min_waste_report);
}

Score score_against_ground_truth(const std::vector<EnergyIssueRecord>& records,
                                 const std::vector<TruthCase>& cases) {
  std::map<std::string, const TruthCase*> by_id;
  for (const TruthCase& c : cases) {
    if (!by_id.emplace(c.id, &c).second) {
      throw Error(Errc::invalid_argument, "duplicate case id " + c.id);
    }
  }

  Score score;
  std::set<std::pair<std::string, int>> detected;
  for (const EnergyIssueRecord& rec : records) {
    auto it = by_id.find(rec.case_ref.id);
    if (it == by_id.end()) {
      throw Error(Errc::invalid_argument,
                  "record references unknown case " + rec.case_ref.id);
    }
    const auto k = static_cast<std::size_t>(rec.kind);
    detected.emplace(rec.case_ref.id, static_cast<int>(k));
    if (it->second->truth[k]) {
      ++score.by_kind[k].tp;
    } else {
      ++score.by_kind[k].fp;
    }
  }
  for (const TruthCase& c : cases) {
    for (std::size_t k = 0; k < 3; ++k) {
      if (c.truth[k] && !detected.count({c.id, static_cast<int>(k)})) {
        ++score.by_kind[k].fn;
      }
    }
  }
  for (KindScore& ks : score.by_kind) {
    if (ks.tp + ks.fp == 0) {
      ks.precision = 1.0;
      ks.vacuous_precision = true;
    } else {
      ks.precision = static_cast<double>(ks.tp) /
                     static_cast<double>(ks.tp + ks.fp);
    }
    if (ks.tp + ks.fn == 0) {
      ks.recall = 1.0;
      ks.vacuous_recall = true;
    } else {
      ks.recall =
          static_cast<double>(ks.tp) / static_cast<double>(ks.tp + ks.fn);
    }
  }
  return score;
}

}  // namespace enertest::detect
