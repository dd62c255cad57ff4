// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal reverse-mode automatic differentiation over dense row-major
// tensors of doubles. Every differentiable op records a backward closure on
// the thread's active Tape; Tape::backward replays them in reverse.

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "slamprune/errors.hpp"

namespace slamprune::nn {

using Shape = std::vector<std::size_t>;
using Rng = std::mt19937_64;

std::size_t numel(const Shape& shape);

namespace detail {
struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until a gradient reaches this node
  bool requires_grad = false;

  void ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
  }
};
}  // namespace detail

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double fill, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values,
                     bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(node_); }
  const Shape& shape() const { return node_->shape; }
  std::size_t dim() const { return node_->shape.size(); }
  std::size_t size() const { return node_->value.size(); }
  /// Leading extent when viewed as a matrix [rows x cols], cols = last axis.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> values() const { return node_->value; }
  std::span<double> mutable_values() { return node_->value; }
  double item() const;
  double at(std::size_t r, std::size_t c) const {
    return node_->value[r * cols() + c];
  }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }

  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad() {
    node_->ensure_grad();
    return node_->grad;
  }
  void clear_grad() { node_->grad.clear(); }

  /// Deep copy with the same requires_grad flag and no gradient.
  Tensor clone() const;

  bool same_node(const Tensor& other) const { return node_ == other.node_; }
  const std::shared_ptr<detail::Node>& node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;
  friend Tensor make_result(Shape shape, std::vector<double> values,
                            bool requires_grad);
};

/// Ordered record of differentiable ops. One tape per forward pass; a tape
/// can be replayed once, after which reset() is required.
class Tape {
 public:
  void record(std::function<void()> backward_fn);
  void backward(const Tensor& loss);
  void reset();
  std::size_t size() const { return entries_.size(); }
  bool consumed() const { return consumed_; }

 private:
  std::vector<std::function<void()>> entries_;
  bool consumed_ = false;
};

/// Installs `tape` as the calling thread's active tape for its lifetime.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

Tape* active_tape();

/// When enabled on the calling thread, every op verifies its outputs are
/// finite and raises ErrorKind::kNumeric otherwise.
class CheckedScope {
 public:
  explicit CheckedScope(bool enabled = true);
  ~CheckedScope();
  CheckedScope(const CheckedScope&) = delete;
  CheckedScope& operator=(const CheckedScope&) = delete;

 private:
  bool previous_;
};
bool checked_mode();

// ---- ops --------------------------------------------------------------

/// a[m x k] * b[k x n]
Tensor matmul(const Tensor& a, const Tensor& b);
/// x[m x in] * w[out x in]^T (+ bias[out])
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& bias = {});
Tensor add(const Tensor& a, const Tensor& b);
/// x[m x n] + row[n] broadcast over rows
Tensor add_row(const Tensor& x, const Tensor& row);
Tensor scale(const Tensor& x, double factor);
Tensor relu(const Tensor& x);
/// Inverted dropout; identity (same tensor) when !train or p == 0.
Tensor dropout(const Tensor& x, double p, bool train, Rng* rng);
/// Normalizes the last axis.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps = 1e-5);
/// softmax(q k^T / sqrt(d)) v on [T x d] inputs.
Tensor scaled_dot_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                            bool causal);
/// Multi-head variant: heads are contiguous column blocks of q/k/v.
Tensor multi_head_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                            std::size_t num_heads, bool causal);
/// Mean negative log-likelihood over rows where mask is true.
Tensor cross_entropy(const Tensor& logits, std::span<const int> targets,
                     const std::vector<bool>& mask);
Tensor concat_rows(std::span<const Tensor> parts);
Tensor gather_rows(const Tensor& table, std::span<const int> ids);
Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t count);
/// Concatenates each run of `factor` consecutive rows into one row; trailing
/// rows that do not fill a complete group are dropped.
Tensor stack_frames(const Tensor& x, std::size_t factor);
Tensor sum(const Tensor& x);

// ---- parameter helpers --------------------------------------------------

/// uniform(-s, s) with s = sqrt(6 / (fan_in + fan_out)); shape [fan_out x fan_in].
Tensor glorot_uniform(std::size_t fan_out, std::size_t fan_in, Rng& rng,
                      bool requires_grad = true);

/// Row-wise log-softmax on raw values (no tape).
std::vector<double> log_softmax(std::span<const double> logits);

}  // namespace slamprune::nn
