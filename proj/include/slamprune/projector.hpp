// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

#include "slamprune/params.hpp"
#include "slamprune/tensor.hpp"

namespace slamprune {

/// concat(concat_factor frames) -> dense -> ReLU -> dropout -> dense -> LayerNorm
struct ProjectorConfig {
  std::size_t concat_factor = 5;
  std::size_t in_dim = 32;  // encoder width
  std::size_t hidden_dim = 64;
  std::size_t out_dim = 64;  // LM embedding width
  double dropout_p = 0.1;

  void validate() const;
};

struct ProjectorWeights {
  nn::Tensor fc1_w, fc1_b, fc2_w, fc2_b, ln_g, ln_b;

  ParamList named() const;
  static ProjectorWeights from_named(const ParamList& params);
};

/// Fresh, trainable projector.
ProjectorWeights init_projector(const ProjectorConfig& config, std::uint64_t seed);

/// Output has floor(T / concat_factor) rows; a trailing partial window is
/// dropped. `rng` is only consulted in train mode.
nn::Tensor project(const ProjectorConfig& config, const ProjectorWeights& weights,
                   const nn::Tensor& enc_out, bool train_mode,
                   nn::Rng* rng = nullptr);

}  // namespace slamprune
