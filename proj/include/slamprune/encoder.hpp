// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0
//
// Pre-norm transformer speech encoder over feature frames. Pruning keeps the
// bottom `keep_layers` blocks and always applies the shared final norm.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "slamprune/params.hpp"
#include "slamprune/tensor.hpp"

namespace slamprune {

struct EncoderConfig {
  std::size_t num_layers = 8;
  std::size_t d_model = 32;
  std::size_t num_heads = 2;
  std::size_t ffn_mult = 4;
  std::size_t feature_dim = 80;

  void validate() const;
};

struct PruneSpec {
  std::size_t keep_layers = 0;
};

struct EncoderBlock {
  nn::Tensor ln1_g, ln1_b;
  nn::Tensor wq, bq, wk, wv, bv, wo, bo;  // key projection has no bias
  nn::Tensor ln2_g, ln2_b;
  nn::Tensor fc1_w, fc1_b, fc2_w, fc2_b;

  ParamList named() const;
};

struct EncoderWeights {
  nn::Tensor in_w, in_b;
  std::vector<EncoderBlock> blocks;
  nn::Tensor ln_post_g, ln_post_b;

  ParamList named() const;
  /// Rebuilds the weight set from a named list produced by named().
  static EncoderWeights from_named(const ParamList& params);
};

EncoderWeights init_encoder(const EncoderConfig& config, std::uint64_t seed);

/// Parameters of one transformer block for this config.
std::size_t encoder_block_params(const EncoderConfig& config);

/// Sinusoidal table [length x d].
nn::Tensor sinusoidal_positions(std::size_t length, std::size_t d);

nn::Tensor encode(const EncoderConfig& config, const EncoderWeights& weights,
                  const nn::Tensor& frames, PruneSpec prune);

/// Full forward exposing the hidden state after every block (before the
/// final norm) alongside the normalized output.
struct EncoderTrace {
  std::vector<nn::Tensor> block_outputs;
  nn::Tensor output;
};
EncoderTrace encode_traced(const EncoderConfig& config,
                           const EncoderWeights& weights,
                           const nn::Tensor& frames);

/// Final norm applied to an arbitrary hidden state.
nn::Tensor encoder_final_norm(const EncoderWeights& weights,
                              const nn::Tensor& hidden);

/// Copy of the weight set with only the bottom keep_layers blocks; every
/// tensor is frozen and value-identical to its source.
EncoderWeights build_pruned_weights(const EncoderWeights& weights,
                                    PruneSpec prune);

}  // namespace slamprune
