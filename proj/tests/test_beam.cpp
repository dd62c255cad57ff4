// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "slamprune/asr.hpp"
#include "slamprune/beam_search.hpp"
#include "toy_models.hpp"

namespace slamprune {
namespace {

std::vector<double> normalized(std::vector<double> row) {
  double mx = -1e300, z = 0.0;
  for (double v : row) mx = std::max(mx, v);
  for (double v : row) z += std::exp(v - mx);
  for (double& v : row) v -= mx + std::log(z);
  return row;
}

// Three tokens (0, 1 = EOS, 2); log-probs depend on the previous token only.
struct BigramLm {
  std::vector<std::vector<double>> table;  // context: BOS, 0, 1, 2
  explicit BigramLm(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 2.0);
    for (int c = 0; c < 4; ++c) table.push_back(normalized({n(rng), n(rng), n(rng)}));
  }
  std::vector<double> operator()(std::span<const int> prefix) const {
    return table[prefix.empty() ? 0 : prefix.back() + 1];
  }
};

TEST(BeamSearch, BeamTwoWithStateRecombinationIsExact) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const BigramLm lm(rng);
    BeamOptions o;
    o.max_len = 3;
    const auto got = beam_search(lm, o, [](std::span<const int> t) { return t.empty() ? -1 : t.back(); });
    double best = -1e300;
    std::vector<int> best_seq;
    for (const std::vector<int>& s : std::vector<std::vector<int>>{
             {}, {0}, {2}, {0, 0}, {0, 2}, {2, 0}, {2, 2}}) {
      double score = 0.0;
      std::vector<int> p;
      for (int t : s) {
        score += lm(p)[t];
        p.push_back(t);
      }
      score += lm(p)[1];
      if (score > best) best = score, best_seq = s;
    }
    EXPECT_EQ(got.tokens, best_seq);
    EXPECT_NEAR(got.score, best, 1e-12);
  }
}

// Greedy with a completion pool: at each step the argmax word extends the
// single live hypothesis and the EOS extension is kept as a candidate.
std::pair<std::vector<int>, double> greedy(const BigramLm& lm, std::size_t max_len) {
  std::vector<int> live;
  double live_score = 0.0, best = -1e300;
  std::vector<int> best_seq;
  for (std::size_t step = 0; step < max_len; ++step) {
    const auto lp = lm(live);
    if (live_score + lp[1] > best) best = live_score + lp[1], best_seq = live;
    const int next = lp[0] >= lp[2] ? 0 : 2;
    live_score += lp[next];
    live.push_back(next);
    if (best >= live_score) break;
  }
  return {best_seq, best};
}

TEST(BeamSearch, BeamOneIsGreedy) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const BigramLm lm(rng);
    BeamOptions o;
    o.beam_size = 1;
    o.max_len = 6;
    const auto got = beam_search(lm, o);
    const auto [seq, score] = greedy(lm, 6);
    if (got.truncated) continue;
    EXPECT_EQ(got.tokens, seq);
    EXPECT_NEAR(got.score, score, 1e-12);
  }
}

TEST(BeamSearch, TruncationFlagWhenEosNeverWins) {
  auto never_eos = [](std::span<const int>) {
    return std::vector<double>{std::log(0.9), -std::numeric_limits<double>::infinity(), std::log(0.1)};
  };
  BeamOptions o;
  o.max_len = 4;
  const auto r = beam_search(never_eos, o);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.tokens.size(), 4u);
}

TEST(BeamSearch, MaxLenCountsEos) {
  auto eos_only_late = [](std::span<const int> p) {
    const double eos = p.size() >= 2 ? 0.0 : -std::numeric_limits<double>::infinity();
    return std::vector<double>{p.size() >= 2 ? -std::numeric_limits<double>::infinity() : 0.0, eos,
                               -std::numeric_limits<double>::infinity()};
  };
  BeamOptions o;
  o.max_len = 3;
  EXPECT_FALSE(beam_search(eos_only_late, o).truncated);
  o.max_len = 2;
  EXPECT_TRUE(beam_search(eos_only_late, o).truncated);
}

TEST(BeamSearch, RejectsZeroBeam) {
  BeamOptions o;
  o.beam_size = 0;
  EXPECT_THROW(beam_search([](std::span<const int>) { return std::vector<double>{0.0, 0.0}; }, o),
               Error);
}

TEST(BeamDecode, DeterministicAndNormalized) {
  const auto ec = testing::toy_encoder_config(2);
  const auto lc = testing::toy_lm_config();
  const AsrBundle b = make_bundle(ec, init_encoder(ec, 1), 2, testing::toy_projector_config(), lc,
                                  init_lm(lc, 2), std::nullopt, 3);
  const auto utt = testing::toy_corpus(1).front();
  const Hypothesis h1 = beam_decode(b, utt, 2, 10);
  const Hypothesis h2 = beam_decode(b, utt, 2, 10);
  EXPECT_EQ(h1.tokens, h2.tokens);
  EXPECT_EQ(h1.score, h2.score);
  EXPECT_EQ(normalize(h1.text), h1.text);
  EXPECT_LE(h1.tokens.size(), 10u);
  for (int t : h1.tokens) EXPECT_NE(t, lc.vocab.bos());
}

}  // namespace
}  // namespace slamprune
