// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0
//
// Naive reference implementations for differential testing. Deliberately
// slow and structurally different from the library: no cached neighbor
// lists, no incremental runs, no recursion tricks. Used as ground truth.

#ifndef ENERTEST_TESTS_ORACLES_HPP
#define ENERTEST_TESTS_ORACLES_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "enertest/efg.hpp"

namespace enertest::testing {

struct NaiveLabel {
  char kind = 'O';      // 'C' core, 'B' border, 'O' outlier
  int cluster = -1;     // -1 for outliers
};

/// DBSCAN by exhaustive rescan: z-normalize (dropping constant dimensions),
/// recompute neighborhoods from scratch on every query, find cores, merge
/// core components by pairwise union, then attach borders with a
/// snapshot-per-wave fixpoint. Cluster ids are renumbered by each
/// component's smallest core index.
std::vector<NaiveLabel> naive_dbscan(
    const std::vector<std::array<double, 4>>& points, double eps, int min_pts);

/// CHPPs by candidate enumeration: every [i, j] sample window is tested
/// from scratch for "all strictly above threshold", maximality on both
/// sides, and minimum duration. Returns [start_ms, end_ms) pairs.
std::vector<std::pair<std::int64_t, std::int64_t>> naive_chpp(
    const std::vector<double>& power_mw, std::int64_t t0_ms,
    std::int64_t sample_period_ms, double threshold_mw,
    std::int64_t min_duration_ms);

/// Root walks of up to max_len nodes by breadth-first worklist expansion
/// over the raw edge list, then globally sorted and truncated to max_paths.
std::vector<std::vector<std::string>> naive_paths(
    const efg::EventFlowGraph& graph, std::size_t max_len,
    std::size_t max_paths);

}  // namespace enertest::testing

#endif  // ENERTEST_TESTS_ORACLES_HPP
