// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "slamprune/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace slamprune {

void TrainRecipe::validate() const {
  if (!(lr > 0.0)) fail(ErrorKind::kConfig, "recipe.lr must be > 0");
  if (!(warmup_frac >= 0.0 && warmup_frac < 1.0)) {
    fail(ErrorKind::kConfig, "recipe.warmup_frac must lie in [0, 1)");
  }
  if (!(clip_norm > 0.0)) fail(ErrorKind::kConfig, "recipe.clip_norm must be > 0");
  if (weight_decay < 0.0) fail(ErrorKind::kConfig, "recipe.weight_decay must be >= 0");
  if (epochs < 1) fail(ErrorKind::kConfig, "recipe.epochs must be >= 1");
  if (batch_size < 1) fail(ErrorKind::kConfig, "recipe.batch_size must be >= 1");
}

double lr_at(std::size_t step, std::size_t total_steps, const TrainRecipe& recipe) {
  if (total_steps < 1 || step >= total_steps) {
    fail(ErrorKind::kSchedule, "lr_at: step " + std::to_string(step) +
                                   " outside [0, " + std::to_string(total_steps) + ")");
  }
  const auto warmup = static_cast<std::size_t>(
      std::ceil(recipe.warmup_frac * static_cast<double>(total_steps)));
  if (step < warmup) {
    return recipe.lr * static_cast<double>(step) / static_cast<double>(warmup);
  }
  const std::size_t decay_steps = total_steps - warmup;
  const double progress =
      decay_steps <= 1 ? 0.0
                       : static_cast<double>(step - warmup) /
                             static_cast<double>(decay_steps - 1);
  return recipe.lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

double clip_grad_norm(const ParamList& params, double max_norm) {
  double sq = 0.0;
  for (const auto& p : params) {
    if (!p.tensor.has_grad()) continue;
    for (double g : p.tensor.grad()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double f = max_norm / norm;
    for (const auto& p : params) {
      if (!p.tensor.has_grad()) continue;
      nn::Tensor t = p.tensor;
      for (double& g : t.mutable_grad()) g *= f;
    }
  }
  return norm;
}

AdamW::AdamW(ParamList params, const TrainRecipe& recipe)
    : params_(std::move(params)),
      beta1_(recipe.beta1),
      beta2_(recipe.beta2),
      eps_(recipe.adam_eps),
      weight_decay_(recipe.weight_decay) {
  for (const auto& p : params_) {
    m_.emplace_back(p.tensor.size(), 0.0);
    v_.emplace_back(p.tensor.size(), 0.0);
  }
}

void AdamW::step(double lr) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    nn::Tensor t = params_[i].tensor;
    if (!t.has_grad()) continue;
    auto w = t.mutable_values();
    const auto g = t.grad();
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      w[j] -= lr * weight_decay_ * w[j];
      m[j] = beta1_ * m[j] + (1.0 - beta1_) * g[j];
      v[j] = beta2_ * v[j] + (1.0 - beta2_) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      w[j] -= lr * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

void AdamW::zero_grad() { zero_grads(params_); }

std::size_t total_steps(std::size_t num_examples, const TrainRecipe& recipe) {
  const std::size_t per_epoch = (num_examples + recipe.batch_size - 1) / recipe.batch_size;
  return per_epoch * recipe.epochs;
}

std::vector<LossRecord> run_training(
    const ParamList& trainable, std::size_t num_examples,
    const TrainRecipe& recipe,
    const std::function<nn::Tensor(std::size_t, nn::Rng&)>& loss_fn) {
  recipe.validate();
  if (num_examples == 0) fail(ErrorKind::kData, "training set is empty");
  nn::Rng rng(recipe.seed);
  AdamW opt(trainable, recipe);
  opt.zero_grad();
  const std::size_t steps = total_steps(num_examples, recipe);
  std::vector<LossRecord> trace;
  trace.reserve(steps);
  std::vector<std::size_t> order(num_examples);
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < recipe.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < num_examples; start += recipe.batch_size) {
      const std::size_t end = std::min(num_examples, start + recipe.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(end - start);
      double batch_loss = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        nn::Tape tape;
        nn::TapeScope scope(tape);
        nn::Tensor loss = loss_fn(order[i], rng);
        const double value = loss.item();
        if (!std::isfinite(value)) {
          fail(ErrorKind::kTrainingDiverged,
               "non-finite loss at step " + std::to_string(step));
        }
        batch_loss += value * inv_batch;
        tape.backward(nn::scale(loss, inv_batch));
      }
      clip_grad_norm(trainable, recipe.clip_norm);
      const double lr = lr_at(step, steps, recipe);
      opt.step(lr);
      opt.zero_grad();
      trace.push_back({step, lr, batch_loss});
      ++step;
    }
  }
  return trace;
}

}  // namespace slamprune
