// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0
//
// Adaptive campaign steering. The campaign keeps one probability p_wei of
// choosing a weighted (vs random) input sequence and a distribution p_ctx
// over running contexts. Every recorded issue nudges the probabilities
// toward the provenance that found it, within configured guard rails.

#ifndef ENERTEST_STEER_HPP
#define ENERTEST_STEER_HPP

#include <cstddef>
#include <vector>

#include "enertest/efg.hpp"
#include "enertest/error.hpp"
#include "enertest/rng.hpp"

namespace enertest::steer {

/// Step sizes and guard thresholds for the update rule.
struct SteeringConfig {
  double delta_wei = 0.05;
  double delta_context = 0.06;
  double wei_up_threshold = 0.8;
  double wei_down_threshold = 0.2;
  double cxt_up_threshold = 0.6;
  double cxt_down_threshold = 0.1;

  void validate() const;
};

/// Current steering probabilities. p_ctx always sums to 1.
struct SteeringState {
  double p_wei = 0.5;
  std::vector<double> p_ctx;
};

/// What choose() picked for the next test case.
struct Choice {
  efg::InputKind input = efg::InputKind::weighted;
  std::size_t context = 0;
};

/// p_wei = 0.5, p_ctx uniform over n_contexts entries.
SteeringState init(std::size_t n_contexts);

/// Draws the next input kind (weighted with probability p_wei) and context
/// (by p_ctx). Consumes exactly two uniform draws from rng. Never mutates
/// the state.
Choice choose(const SteeringState& state, SplitMix64& rng);

/// Applies the issue-feedback rule for an issue found with the given
/// provenance:
///   - weighted input and p_wei <= wei_up_threshold: p_wei += delta_wei
///   - random input and p_wei >= wei_down_threshold: p_wei -= delta_wei
///   - context k, when p_ctx[k] <= cxt_up_threshold and n > 0 other entries
///     exceed cxt_down_threshold: p_ctx[k] += delta_context and each of
///     those n entries decreases by delta_context / n
/// Guards are checked before the step, so a single step may land past a
/// threshold; that overshoot is part of the contract. Throws Errc::index on
/// a bad context index.
void update_on_issue(SteeringState& state, efg::InputKind input,
                     std::size_t context, const SteeringConfig& cfg);

}  // namespace enertest::steer

#endif  // ENERTEST_STEER_HPP
