// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0
//
// Small seeded models and corpora shared by unit tests and the acceptance
// binary.

#pragma once

#include <set>
#include <string>
#include <vector>

#include "slamprune/asr.hpp"
#include "slamprune/synth_data.hpp"

namespace slamprune::testing {

inline Vocab toy_vocab() {
  std::set<std::string> chars{" ", "'"};
  for (const auto& p : builtin_profiles()) chars.insert(p.alphabet.begin(), p.alphabet.end());
  return Vocab::from_characters({chars.begin(), chars.end()});
}

inline EncoderConfig toy_encoder_config(std::size_t layers = 4) {
  EncoderConfig c;
  c.num_layers = layers;
  c.d_model = 8;
  c.num_heads = 2;
  c.ffn_mult = 2;
  return c;
}

inline LmConfig toy_lm_config() {
  LmConfig c;
  c.vocab = toy_vocab();
  c.d_model = 8;
  c.num_layers = 1;
  c.num_heads = 2;
  c.max_seq = 96;
  c.ffn_mult = 2;
  return c;
}

inline ProjectorConfig toy_projector_config() {
  ProjectorConfig c;
  c.in_dim = 8;
  c.hidden_dim = 8;
  c.out_dim = 8;
  return c;
}

inline LoraConfig toy_lora_config() {
  LoraConfig c;
  c.rank = 2;
  c.alpha = 4.0;
  return c;
}

/// A handful of short English utterances with light noise.
inline std::vector<Utterance> toy_corpus(std::size_t n, std::uint64_t seed = 5) {
  LanguageProfile p = builtin_profile("en");
  p.noise_sigma = 0.3;
  p.max_words = 2;
  p.min_words = 1;
  return generate_corpus(p, TierSpec{"toy", "en", n, 1, 1}, seed).train;
}

}  // namespace slamprune::testing
