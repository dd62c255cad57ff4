// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "slamprune/projector.hpp"

#include <map>
#include <string>

namespace slamprune {

using nn::Tensor;

void ProjectorConfig::validate() const {
  if (concat_factor < 1) fail(ErrorKind::kConfig, "projector.concat_factor must be >= 1");
  if (in_dim < 1 || hidden_dim < 1 || out_dim < 1) {
    fail(ErrorKind::kConfig, "projector dimensions must be positive");
  }
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) {
    fail(ErrorKind::kConfig, "projector.dropout_p must lie in [0, 1)");
  }
}

ParamList ProjectorWeights::named() const {
  return {{"fc1.w", fc1_w}, {"fc1.b", fc1_b}, {"fc2.w", fc2_w},
          {"fc2.b", fc2_b}, {"ln.g", ln_g},   {"ln.b", ln_b}};
}

ProjectorWeights ProjectorWeights::from_named(const ParamList& params) {
  std::map<std::string, Tensor> m;
  for (const auto& p : params) m[p.name] = p.tensor;
  for (const char* n : {"fc1.w", "fc1.b", "fc2.w", "fc2.b", "ln.g", "ln.b"}) {
    if (!m.count(n)) fail(ErrorKind::kIo, std::string("projector checkpoint lacks ") + n);
  }
  return {m["fc1.w"], m["fc1.b"], m["fc2.w"], m["fc2.b"], m["ln.g"], m["ln.b"]};
}

ProjectorWeights init_projector(const ProjectorConfig& config, std::uint64_t seed) {
  config.validate();
  nn::Rng rng(seed);
  ProjectorWeights w;
  w.fc1_w = nn::glorot_uniform(config.hidden_dim, config.concat_factor * config.in_dim, rng);
  w.fc1_b = Tensor::zeros({config.hidden_dim}, true);
  w.fc2_w = nn::glorot_uniform(config.out_dim, config.hidden_dim, rng);
  w.fc2_b = Tensor::zeros({config.out_dim}, true);
  w.ln_g = Tensor::full({config.out_dim}, 1.0, true);
  w.ln_b = Tensor::zeros({config.out_dim}, true);
  return w;
}

Tensor project(const ProjectorConfig& config, const ProjectorWeights& weights,
               const Tensor& enc_out, bool train_mode, nn::Rng* rng) {
  if (enc_out.dim() != 2 || enc_out.cols() != config.in_dim) {
    fail(ErrorKind::kDimension, "project: encoder output must be [T x " +
                                    std::to_string(config.in_dim) + "]");
  }
  if (enc_out.rows() < config.concat_factor) {
    fail(ErrorKind::kTooShortInput,
         "project: " + std::to_string(enc_out.rows()) + " frames < concat factor " +
             std::to_string(config.concat_factor));
  }
  Tensor x = nn::stack_frames(enc_out, config.concat_factor);
  x = nn::relu(nn::linear(x, weights.fc1_w, weights.fc1_b));
  x = nn::dropout(x, config.dropout_p, train_mode, rng);
  x = nn::linear(x, weights.fc2_w, weights.fc2_b);
  return nn::layer_norm(x, weights.ln_g, weights.ln_b);
}

}  // namespace slamprune
