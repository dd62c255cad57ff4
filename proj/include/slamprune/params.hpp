// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slamprune/tensor.hpp"

namespace slamprune {

struct NamedTensor {
  std::string name;
  nn::Tensor tensor;
};

/// Ordered, named view over a model's tensors. Copies share storage.
using ParamList = std::vector<NamedTensor>;

std::size_t param_count(const ParamList& params);
void set_trainable(const ParamList& params, bool trainable);
void zero_grads(const ParamList& params);

/// FNV-1a over names, shapes and the raw bytes of every value; any bit flip
/// changes the digest.
std::uint64_t content_hash(const ParamList& params);

/// Deep copy of every value, used to verify the freeze contract.
std::vector<std::vector<double>> snapshot(const ParamList& params);
bool bit_identical(const ParamList& params,
                   const std::vector<std::vector<double>>& snap);

void append_prefixed(ParamList& out, const std::string& prefix,
                     const ParamList& in);

}  // namespace slamprune
