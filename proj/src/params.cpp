// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "slamprune/params.hpp"

#include <cstring>

namespace slamprune {

namespace {
constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}
}  // namespace

std::size_t param_count(const ParamList& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.tensor.size();
  return n;
}

void set_trainable(const ParamList& params, bool trainable) {
  for (const auto& p : params) {
    nn::Tensor t = p.tensor;
    t.set_requires_grad(trainable);
    if (!trainable) t.clear_grad();
  }
}

void zero_grads(const ParamList& params) {
  for (const auto& p : params) {
    nn::Tensor t = p.tensor;
    t.clear_grad();
  }
}

std::uint64_t content_hash(const ParamList& params) {
  std::uint64_t h = kFnvOffset;
  for (const auto& p : params) {
    fnv_bytes(h, p.name.data(), p.name.size());
    for (std::size_t d : p.tensor.shape()) {
      const std::uint64_t d64 = d;
      fnv_bytes(h, &d64, sizeof d64);
    }
    const auto v = p.tensor.values();
    fnv_bytes(h, v.data(), v.size() * sizeof(double));
  }
  return h;
}

std::vector<std::vector<double>> snapshot(const ParamList& params) {
  std::vector<std::vector<double>> out;
  out.reserve(params.size());
  for (const auto& p : params) {
    out.emplace_back(p.tensor.values().begin(), p.tensor.values().end());
  }
  return out;
}

bool bit_identical(const ParamList& params,
                   const std::vector<std::vector<double>>& snap) {
  if (params.size() != snap.size()) return false;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto v = params[i].tensor.values();
    if (v.size() != snap[i].size()) return false;
    if (std::memcmp(v.data(), snap[i].data(), v.size() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

void append_prefixed(ParamList& out, const std::string& prefix,
                     const ParamList& in) {
  for (const auto& p : in) out.push_back({prefix + p.name, p.tensor});
}

}  // namespace slamprune
