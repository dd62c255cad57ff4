// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "slamprune/encoder.hpp"

#include <cmath>
#include <map>
#include <string>

namespace slamprune {

using nn::Tensor;

void EncoderConfig::validate() const {
  if (num_layers < 1) fail(ErrorKind::kConfig, "encoder.num_layers must be >= 1");
  if (d_model < 1 || num_heads < 1 || ffn_mult < 1 || feature_dim < 1) {
    fail(ErrorKind::kConfig, "encoder dimensions must be positive");
  }
  if (d_model % num_heads != 0) {
    fail(ErrorKind::kConfig, "encoder.d_model must be divisible by num_heads");
  }
}

ParamList EncoderBlock::named() const {
  return {{"ln1.g", ln1_g}, {"ln1.b", ln1_b}, {"attn.wq", wq}, {"attn.bq", bq},
          {"attn.wk", wk},  {"attn.wv", wv},  {"attn.bv", bv}, {"attn.wo", wo},
          {"attn.bo", bo},  {"ln2.g", ln2_g}, {"ln2.b", ln2_b}, {"fc1.w", fc1_w},
          {"fc1.b", fc1_b}, {"fc2.w", fc2_w}, {"fc2.b", fc2_b}};
}

ParamList EncoderWeights::named() const {
  ParamList out{{"in.w", in_w}, {"in.b", in_b}};
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    append_prefixed(out, "blocks." + std::to_string(i) + ".", blocks[i].named());
  }
  out.push_back({"ln_post.g", ln_post_g});
  out.push_back({"ln_post.b", ln_post_b});
  return out;
}

EncoderWeights EncoderWeights::from_named(const ParamList& params) {
  std::map<std::string, Tensor> by_name;
  for (const auto& p : params) by_name[p.name] = p.tensor;
  auto get = [&](const std::string& n) {
    auto it = by_name.find(n);
    if (it == by_name.end()) fail(ErrorKind::kIo, "encoder checkpoint lacks tensor " + n);
    return it->second;
  };
  EncoderWeights w;
  w.in_w = get("in.w");
  w.in_b = get("in.b");
  for (std::size_t i = 0; by_name.count("blocks." + std::to_string(i) + ".ln1.g"); ++i) {
    const std::string p = "blocks." + std::to_string(i) + ".";
    EncoderBlock b;
    b.ln1_g = get(p + "ln1.g");
    b.ln1_b = get(p + "ln1.b");
    b.wq = get(p + "attn.wq");
    b.bq = get(p + "attn.bq");
    b.wk = get(p + "attn.wk");
    b.wv = get(p + "attn.wv");
    b.bv = get(p + "attn.bv");
    b.wo = get(p + "attn.wo");
    b.bo = get(p + "attn.bo");
    b.ln2_g = get(p + "ln2.g");
    b.ln2_b = get(p + "ln2.b");
    b.fc1_w = get(p + "fc1.w");
    b.fc1_b = get(p + "fc1.b");
    b.fc2_w = get(p + "fc2.w");
    b.fc2_b = get(p + "fc2.b");
    w.blocks.push_back(std::move(b));
  }
  w.ln_post_g = get("ln_post.g");
  w.ln_post_b = get("ln_post.b");
  return w;
}

EncoderWeights init_encoder(const EncoderConfig& config, std::uint64_t seed) {
  config.validate();
  nn::Rng rng(seed);
  const std::size_t d = config.d_model, f = config.ffn_mult * d;
  auto zeros = [](std::size_t n) { return Tensor::zeros({n}, true); };
  auto ones = [](std::size_t n) { return Tensor::full({n}, 1.0, true); };
  EncoderWeights w;
  w.in_w = nn::glorot_uniform(d, config.feature_dim, rng);
  w.in_b = zeros(d);
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    EncoderBlock b;
    b.ln1_g = ones(d);
    b.ln1_b = zeros(d);
    b.wq = nn::glorot_uniform(d, d, rng);
    b.bq = zeros(d);
    b.wk = nn::glorot_uniform(d, d, rng);
    b.wv = nn::glorot_uniform(d, d, rng);
    b.bv = zeros(d);
    b.wo = nn::glorot_uniform(d, d, rng);
    b.bo = zeros(d);
    b.ln2_g = ones(d);
    b.ln2_b = zeros(d);
    b.fc1_w = nn::glorot_uniform(f, d, rng);
    b.fc1_b = zeros(f);
    b.fc2_w = nn::glorot_uniform(d, f, rng);
    b.fc2_b = zeros(d);
    w.blocks.push_back(std::move(b));
  }
  w.ln_post_g = ones(d);
  w.ln_post_b = zeros(d);
  return w;
}

std::size_t encoder_block_params(const EncoderConfig& config) {
  const std::size_t d = config.d_model, m = config.ffn_mult;
  const std::size_t attention = 4 * d * d + 3 * d;
  const std::size_t ffn = 2 * m * d * d + m * d + d;
  const std::size_t norms = 4 * d;
  return attention + ffn + norms;
}

Tensor sinusoidal_positions(std::size_t length, std::size_t d) {
  std::vector<double> v(length * d);
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t i = 0; i < d; ++i) {
      const double rate =
          std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / static_cast<double>(d));
      v[t * d + i] = (i % 2 == 0) ? std::sin(t * rate) : std::cos(t * rate);
    }
  }
  return Tensor::from({length, d}, std::move(v));
}

namespace {

Tensor run_block(const EncoderBlock& b, const Tensor& x, std::size_t heads) {
  Tensor h = nn::layer_norm(x, b.ln1_g, b.ln1_b);
  Tensor q = nn::linear(h, b.wq, b.bq);
  Tensor k = nn::linear(h, b.wk);
  Tensor v = nn::linear(h, b.wv, b.bv);
  Tensor a = nn::multi_head_attention(q, k, v, heads, /*causal=*/false);
  Tensor x1 = nn::add(x, nn::linear(a, b.wo, b.bo));
  Tensor h2 = nn::layer_norm(x1, b.ln2_g, b.ln2_b);
  Tensor f = nn::linear(nn::relu(nn::linear(h2, b.fc1_w, b.fc1_b)), b.fc2_w, b.fc2_b);
  return nn::add(x1, f);
}

Tensor embed_frames(const EncoderConfig& config, const EncoderWeights& w,
                    const Tensor& frames) {
  if (frames.dim() != 2 || frames.cols() != config.feature_dim) {
    fail(ErrorKind::kDimension, "encode: frames must be [T x " +
                                    std::to_string(config.feature_dim) + "]");
  }
  if (frames.rows() < 1) fail(ErrorKind::kDimension, "encode: empty frame matrix");
  Tensor x = nn::linear(frames, w.in_w, w.in_b);
  return nn::add(x, sinusoidal_positions(frames.rows(), config.d_model));
}

void check_prune(PruneSpec prune, std::size_t available) {
  if (prune.keep_layers < 1 || prune.keep_layers > available) {
    fail(ErrorKind::kPrune, "keep_layers " + std::to_string(prune.keep_layers) +
                                " outside [1, " + std::to_string(available) + "]");
  }
}

}  // namespace

Tensor encoder_final_norm(const EncoderWeights& weights, const Tensor& hidden) {
  return nn::layer_norm(hidden, weights.ln_post_g, weights.ln_post_b);
}

Tensor encode(const EncoderConfig& config, const EncoderWeights& weights,
              const Tensor& frames, PruneSpec prune) {
  check_prune(prune, weights.blocks.size());
  Tensor x = embed_frames(config, weights, frames);
  for (std::size_t l = 0; l < prune.keep_layers; ++l) {
    x = run_block(weights.blocks[l], x, config.num_heads);
  }
  return encoder_final_norm(weights, x);
}

EncoderTrace encode_traced(const EncoderConfig& config,
                           const EncoderWeights& weights, const Tensor& frames) {
  EncoderTrace trace;
  Tensor x = embed_frames(config, weights, frames);
  for (const auto& block : weights.blocks) {
    x = run_block(block, x, config.num_heads);
    trace.block_outputs.push_back(x);
  }
  trace.output = encoder_final_norm(weights, x);
  return trace;
}

EncoderWeights build_pruned_weights(const EncoderWeights& weights,
                                    PruneSpec prune) {
  check_prune(prune, weights.blocks.size());
  auto frozen = [](const Tensor& t) {
    Tensor c = t.clone();
    c.set_requires_grad(false);
    return c;
  };
  EncoderWeights out;
  out.in_w = frozen(weights.in_w);
  out.in_b = frozen(weights.in_b);
  for (std::size_t l = 0; l < prune.keep_layers; ++l) {
    const EncoderBlock& b = weights.blocks[l];
    EncoderBlock c;
    c.ln1_g = frozen(b.ln1_g);
    c.ln1_b = frozen(b.ln1_b);
    c.wq = frozen(b.wq);
    c.bq = frozen(b.bq);
    c.wk = frozen(b.wk);
    c.wv = frozen(b.wv);
    c.bv = frozen(b.bv);
    c.wo = frozen(b.wo);
    c.bo = frozen(b.bo);
    c.ln2_g = frozen(b.ln2_g);
    c.ln2_b = frozen(b.ln2_b);
    c.fc1_w = frozen(b.fc1_w);
    c.fc1_b = frozen(b.fc1_b);
    c.fc2_w = frozen(b.fc2_w);
    c.fc2_b = frozen(b.fc2_b);
    out.blocks.push_back(std::move(c));
  }
  out.ln_post_g = frozen(weights.ln_post_g);
  out.ln_post_b = frozen(weights.ln_post_b);
  return out;
}

}  // namespace slamprune
