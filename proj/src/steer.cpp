// Copyright 2026 The enertest Authors
// SPDX-License-Identifier: Apache-2.0

#include "enertest/steer.hpp"

namespace enertest::steer {

void SteeringConfig::validate() const {
  const bool ok = delta_wei > 0.0 && delta_context > 0.0 &&
                  wei_down_threshold > 0.0 &&
                  wei_down_threshold < wei_up_threshold &&
                  wei_up_threshold < 1.0 && cxt_down_threshold > 0.0 &&
                  cxt_down_threshold < cxt_up_threshold &&
                  cxt_up_threshold < 1.0;
  if (!ok) {
    throw Error(Errc::config, "invalid steering configuration");
  }
}

SteeringState init(std::size_t n_contexts) {
  if (n_contexts < 1) {
    throw Error(Errc::invalid_argument, "need at least one context");
  }
  SteeringState state;
  state.p_wei = 0.5;
  state.p_ctx.assign(n_contexts, 1.0 / static_cast<double>(n_contexts));
  return state;
}

Choice choose(const SteeringState& state, SplitMix64& rng) {
  Choice choice;
  choice.input = rng.next_unit() < state.p_wei ? efg::InputKind::weighted
                                               : efg::InputKind::random;
  const double u = rng.next_unit();
  double cumulative = 0.0;
  choice.context = state.p_ctx.size() - 1;  // fallback absorbs rounding
  for (std::size_t k = 0; k < state.p_ctx.size(); ++k) {
    cumulative += state.p_ctx[k];
    if (u < cumulative) {
      choice.context = k;
      break;
    }
  }
  return choice;
}

void update_on_issue(SteeringState& state, efg::InputKind input,
                     std::size_t context, const SteeringConfig& cfg) {
  cfg.validate();
  if (context >= state.p_ctx.size()) {
    throw Error(Errc::index, "context index out of range");
  }

  if (input == efg::InputKind::weighted) {
    if (state.p_wei <= cfg.wei_up_threshold) state.p_wei += cfg.delta_wei;
  } else {
    if (state.p_wei >= cfg.wei_down_threshold) state.p_wei -= cfg.delta_wei;
  }

  if (state.p_ctx[context] <= cfg.cxt_up_threshold) {
    std::vector<std::size_t> donors;
    for (std::size_t k = 0; k < state.p_ctx.size(); ++k) {
      if (k != context && state.p_ctx[k] > cfg.cxt_down_threshold) {
        donors.push_back(k);
      }
    }
    if (!donors.empty()) {
      const double share =
          cfg.delta_context / static_cast<double>(donors.size());
      state.p_ctx[context] += cfg.delta_context;
      for (std::size_t k : donors) state.p_ctx[k] -= share;
    }
  }
}

}  // namespace enertest::steer
