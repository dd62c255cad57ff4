// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for the unit tests: random tensors and a central-difference
// gradient checker.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "slamprune/tensor.hpp"

namespace slamprune::testing {

inline nn::Tensor random_tensor(nn::Shape shape, nn::Rng& rng, bool requires_grad = true,
                                double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<double> v(nn::numel(shape));
  for (double& x : v) x = n(rng);
  return nn::Tensor::from(std::move(shape), std::move(v), requires_grad);
}

/// Reduces `out` to a scalar through a fixed random linear read-out so every
/// output element receives a distinct upstream gradient.
inline nn::Tensor readout(const nn::Tensor& out, std::uint64_t seed = 99) {
  nn::Rng rng(seed);
  nn::Tensor r = random_tensor({1, out.cols()}, rng, false);
  return nn::sum(nn::linear(out, r));
}

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

/// Compares reverse-mode gradients of `loss_fn` with respect to `params`
/// against central differences. Relative error uses a 1e-6 floor.
inline GradCheck check_gradients(const std::vector<nn::Tensor>& params,
                                 const std::function<nn::Tensor()>& loss_fn,
                                 double h = 1e-5) {
  for (auto p : params) p.clear_grad();
  {
    nn::Tape tape;
    nn::TapeScope scope(tape);
    nn::Tensor loss = loss_fn();
    tape.backward(loss);
  }
  GradCheck out;
  for (auto p : params) {
    std::vector<double> analytic(p.size(), 0.0);
    if (p.has_grad()) std::copy(p.grad().begin(), p.grad().end(), analytic.begin());
    auto w = p.mutable_values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double keep = w[i];
      w[i] = keep + h;
      const double fp = loss_fn().item();
      w[i] = keep - h;
      const double fm = loss_fn().item();
      w[i] = keep;
      const double numeric = (fp - fm) / (2.0 * h);
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
      out.max_rel_error = std::max(out.max_rel_error, std::abs(analytic[i] - numeric) / denom);
      ++out.checked;
    }
  }
  return out;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("slamprune_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace slamprune::testing
