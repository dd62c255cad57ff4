// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "slamprune/param_account.hpp"

#include <cstdio>

#include "slamprune/errors.hpp"

namespace slamprune {

void EncoderShape::validate() const {
  if (d_model <= 0 || num_layers <= 0 || feature_channels <= 0 || conv1_kernel <= 0 ||
      conv2_kernel <= 0 || pos_table_len <= 0 || ffn_mult <= 0) {
    fail(ErrorKind::kConfig, "encoder shape '" + name + "': all fields must be positive");
  }
}

EncoderShape whisper_small() { return {"small", 768, 12}; }
EncoderShape whisper_medium() { return {"medium", 1024, 24}; }
EncoderShape whisper_large_v2() { return {"large-v2", 1280, 32}; }
std::vector<EncoderShape> whisper_shapes() {
  return {whisper_small(), whisper_medium(), whisper_large_v2()};
}

std::int64_t encoder_layer_param_count(const EncoderShape& s) {
  s.validate();
  const std::int64_t d = s.d_model;
  const std::int64_t f = s.ffn_mult * d;
  const std::int64_t attention = 4 * d * d + 3 * d;
  const std::int64_t ffn = 2 * d * f + f + d;
  const std::int64_t norms = 4 * d;
  return attention + ffn + norms;
}

std::int64_t encoder_param_count(const EncoderShape& s) {
  const std::int64_t d = s.d_model;
  const std::int64_t conv1 = s.feature_channels * d * s.conv1_kernel + d;
  const std::int64_t conv2 = d * d * s.conv2_kernel + d;
  const std::int64_t pos = s.pos_table_len * d;
  return conv1 + conv2 + pos + s.num_layers * encoder_layer_param_count(s) + 2 * d;
}

std::vector<ReductionRow> reduction_table(const EncoderShape& shape,
                                          const std::vector<std::int64_t>& depths) {
  const std::int64_t full = encoder_param_count(shape);
  const std::int64_t layer = encoder_layer_param_count(shape);
  std::vector<ReductionRow> rows;
  for (std::int64_t kept : depths) {
    if (kept < 1 || kept > shape.num_layers) {
      fail(ErrorKind::kPrune, "depth " + std::to_string(kept) + " outside [1, " +
                                  std::to_string(shape.num_layers) + "]");
    }
    const std::int64_t removed = (shape.num_layers - kept) * layer;
    rows.push_back({kept, removed, 100.0 * static_cast<double>(removed) /
                                       static_cast<double>(full)});
  }
  return rows;
}

std::vector<std::int64_t> depth_schedule(std::int64_t num_layers, std::int64_t step) {
  if (num_layers < 1 || step < 1) fail(ErrorKind::kConfig, "invalid depth schedule");
  std::vector<std::int64_t> out;
  for (std::int64_t k = num_layers; k >= 1; k -= step) out.push_back(k);
  return out;
}

std::string reduction_csv(const EncoderShape& shape, const std::vector<ReductionRow>& rows) {
  std::string out = "scale,base_params,layers_kept,params_removed,reduction_pct\n";
  const std::int64_t full = encoder_param_count(shape);
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%lld,%lld,%lld,%.1f\n", shape.name.c_str(),
                  static_cast<long long>(full), static_cast<long long>(r.layers_kept),
                  static_cast<long long>(r.params_removed), r.reduction_pct);
    out += buf;
  }
  return out;
}

LmShape qwen25_3b_shape() { return {36, 2048, 256}; }

LmShape lm_shape(const LmConfig& config) {
  const auto d = static_cast<std::int64_t>(config.d_model);
  return {static_cast<std::int64_t>(config.num_layers), d, d};
}

std::int64_t lora_param_count(const LmShape& shape, const LoraConfig& config) {
  config.validate();
  const std::int64_t r = static_cast<std::int64_t>(config.rank);
  std::int64_t per_layer = 0;
  for (LoraTarget t : config.targets) {
    const std::int64_t d_in = shape.d_model;
    const std::int64_t d_out =
        (t == LoraTarget::kK || t == LoraTarget::kV) ? shape.kv_width : shape.d_model;
    per_layer += r * (d_in + d_out);
  }
  return shape.num_layers * per_layer;
}

std::int64_t net_delta(const EncoderShape& shape, std::int64_t kept,
                       std::int64_t lora_overhead) {
  if (kept < 1 || kept > shape.num_layers) {
    fail(ErrorKind::kPrune, "net_delta: kept outside [1, L]");
  }
  return -(shape.num_layers - kept) * encoder_layer_param_count(shape) + lora_overhead;
}

}  // namespace slamprune
