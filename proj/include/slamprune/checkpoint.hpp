// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0
//
// Binary checkpoint layout (little-endian):
//   "SLPRCKPT" | u32 version | u32 meta_len | meta bytes | u64 tensor_count
//   per tensor: u32 name_len | name | u32 ndims | u64 dims[ndims] | f64 values
// `meta` is free-form text (the CLI stores the producing config as JSON).

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "slamprune/params.hpp"

namespace slamprune {

inline constexpr std::string_view kCheckpointMagic = "SLPRCKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::string meta;
  ParamList tensors;

  const nn::Tensor& get(std::string_view name) const;
  /// Tensors whose name starts with `prefix`, with the prefix stripped.
  ParamList with_prefix(std::string_view prefix) const;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// Raises kMissingArtifact when the file does not exist.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace slamprune
