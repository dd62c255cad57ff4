// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0
//
// Analytic parameter counts for Whisper-style encoder shapes and LoRA
// overheads. Nothing here touches weights.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slamprune/language_model.hpp"

namespace slamprune {

struct EncoderShape {
  std::string name;
  std::int64_t d_model = 0;
  std::int64_t num_layers = 0;
  std::int64_t feature_channels = 80;
  std::int64_t conv1_kernel = 3;
  std::int64_t conv2_kernel = 3;
  std::int64_t pos_table_len = 1500;
  std::int64_t ffn_mult = 4;

  void validate() const;
};

EncoderShape whisper_small();
EncoderShape whisper_medium();
EncoderShape whisper_large_v2();
std::vector<EncoderShape> whisper_shapes();

/// Attention (4d^2 + 3d, key without bias) + FFN + two layer norms.
std::int64_t encoder_layer_param_count(const EncoderShape& shape);
/// conv1 + conv2 + positional table + layers + final norm.
std::int64_t encoder_param_count(const EncoderShape& shape);

struct ReductionRow {
  std::int64_t layers_kept = 0;
  std::int64_t params_removed = 0;
  double reduction_pct = 0.0;
};

std::vector<ReductionRow> reduction_table(const EncoderShape& shape,
                                          const std::vector<std::int64_t>& depths);
/// L, L-2, ..., 2 (or down to 1 for odd L).
std::vector<std::int64_t> depth_schedule(std::int64_t num_layers, std::int64_t step = 2);

/// `scale,base_params,layers_kept,params_removed,reduction_pct` with the
/// percentage at one decimal.
std::string reduction_csv(const EncoderShape& shape, const std::vector<ReductionRow>& rows);

struct LmShape {
  std::int64_t num_layers = 0;
  std::int64_t d_model = 0;
  /// Output width of the K and V projections (smaller under grouped-query
  /// attention).
  std::int64_t kv_width = 0;
};

LmShape qwen25_3b_shape();
LmShape lm_shape(const LmConfig& config);

/// Sum over layers and targeted matrices of r * (d_in + d_out).
std::int64_t lora_param_count(const LmShape& shape, const LoraConfig& config);

/// Signed change relative to the full encoder: -(removed) + lora_overhead.
std::int64_t net_delta(const EncoderShape& shape, std::int64_t kept,
                       std::int64_t lora_overhead);

}  // namespace slamprune
