// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "slamprune/params.hpp"
#include "slamprune/tensor.hpp"

namespace slamprune {

struct TrainRecipe {
  double lr = 1e-4;
  double weight_decay = 0.01;
  double clip_norm = 1.0;
  double warmup_frac = 0.05;
  std::size_t epochs = 1;
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
};

/// Linear warmup over the first ceil(warmup_frac * total) steps, then cosine
/// decay to zero across the remaining steps.
double lr_at(std::size_t step, std::size_t total_steps, const TrainRecipe& recipe);

/// Rescales gradients in place so their global L2 norm is at most max_norm.
/// Returns the norm measured before clipping.
double clip_grad_norm(const ParamList& params, double max_norm);

/// AdamW with decoupled weight decay (applied to the parameter, not the
/// gradient). Parameters without a gradient are skipped for that step.
class AdamW {
 public:
  AdamW(ParamList params, const TrainRecipe& recipe);

  void step(double lr);
  void zero_grad();
  std::size_t steps_taken() const { return t_; }
  const ParamList& params() const { return params_; }

 private:
  ParamList params_;
  double beta1_, beta2_, eps_, weight_decay_;
  std::vector<std::vector<double>> m_, v_;
  std::size_t t_ = 0;
};

struct LossRecord {
  std::size_t step;
  double lr;
  double loss;
};

/// Runs `epochs` passes over `num_examples` in a seed-shuffled order with
/// mini-batches of gradient accumulation, clipping and AdamW. The loss
/// callback builds the forward pass for one example under an active tape.
/// A non-finite loss aborts with ErrorKind::kTrainingDiverged.
std::vector<LossRecord> run_training(
    const ParamList& trainable, std::size_t num_examples,
    const TrainRecipe& recipe,
    const std::function<nn::Tensor(std::size_t example, nn::Rng& rng)>& loss_fn);

std::size_t total_steps(std::size_t num_examples, const TrainRecipe& recipe);

}  // namespace slamprune
