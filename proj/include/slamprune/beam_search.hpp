// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0
//
// Generic beam search over an autoregressive next-token distribution.
// Scores are summed log-probabilities with no length normalization.

#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "slamprune/errors.hpp"

namespace slamprune {

/// Returns log-probabilities over the vocabulary for the next token.
template <typename F>
concept NextTokenScorer = requires(F f, std::span<const int> prefix) {
  { f(prefix) } -> std::convertible_to<std::vector<double>>;
};

struct BeamOptions {
  std::size_t beam_size = 2;
  /// Upper bound on generated tokens, the closing EOS included.
  std::size_t max_len = 64;
  int eos = 1;
};

struct BeamResult {
  std::vector<int> tokens;  // without EOS
  double score = 0.0;
  /// True when no hypothesis reached EOS within max_len.
  bool truncated = false;
};

/// Hypotheses ending in EOS move to a finished pool; the best beam_size
/// non-EOS extensions stay live. When `state_key` maps two live hypotheses
/// to the same key only the higher-scoring one survives (a no-op for the
/// default key, the full token sequence). Search stops once the best
/// finished score is at least the best live score, since live scores can
/// only decrease.
template <NextTokenScorer Scorer, typename KeyFn>
BeamResult beam_search(Scorer&& scorer, const BeamOptions& options, KeyFn&& state_key) {
  if (options.beam_size < 1) fail(ErrorKind::kConfig, "beam_size must be >= 1");
  if (options.max_len < 1) fail(ErrorKind::kConfig, "max_len must be >= 1");
  struct Hyp {
    std::vector<int> tokens;
    double score;
  };
  auto better = [](const Hyp& a, const Hyp& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.tokens < b.tokens;
  };
  std::vector<Hyp> live{{{}, 0.0}};
  std::vector<Hyp> finished;
  for (std::size_t step = 0; step < options.max_len && !live.empty(); ++step) {
    std::vector<Hyp> candidates;
    for (const Hyp& h : live) {
      const std::vector<double> lp = scorer(std::span<const int>(h.tokens));
      for (std::size_t t = 0; t < lp.size(); ++t) {
        if (lp[t] == -std::numeric_limits<double>::infinity()) continue;
        if (static_cast<int>(t) == options.eos) {
          finished.push_back({h.tokens, h.score + lp[t]});
          continue;
        }
        Hyp c{h.tokens, h.score + lp[t]};
        c.tokens.push_back(static_cast<int>(t));
        candidates.push_back(std::move(c));
      }
    }
    std::sort(candidates.begin(), candidates.end(), better);
    live.clear();
    std::vector<decltype(state_key(std::span<const int>{}))> seen;
    for (auto& c : candidates) {
      if (live.size() == options.beam_size) break;
      auto key = state_key(std::span<const int>(c.tokens));
      if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
      seen.push_back(std::move(key));
      live.push_back(std::move(c));
    }
    if (!finished.empty() && !live.empty()) {
      const auto best_done = std::min_element(finished.begin(), finished.end(), better);
      if (best_done->score >= live.front().score) break;
    }
  }
  if (!finished.empty()) {
    const auto best = std::min_element(finished.begin(), finished.end(), better);
    return {best->tokens, best->score, false};
  }
  if (live.empty()) fail(ErrorKind::kNumeric, "beam search produced no hypothesis");
  return {live.front().tokens, live.front().score, true};
}

template <NextTokenScorer Scorer>
BeamResult beam_search(Scorer&& scorer, const BeamOptions& options) {
  return beam_search(std::forward<Scorer>(scorer), options,
                     [](std::span<const int> tokens) {
                       return std::vector<int>(tokens.begin(), tokens.end());
                     });
}

}  // namespace slamprune
