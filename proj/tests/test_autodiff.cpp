// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "slamprune/tensor.hpp"
#include "test_util.hpp"

namespace slamprune {
namespace {

using nn::Tensor;
using testing::check_gradients;
using testing::random_tensor;
using testing::readout;

constexpr double kTol = 1e-4;

TEST(Gradients, Matmul) {
  nn::Rng rng(1);
  Tensor a = random_tensor({3, 4}, rng), b = random_tensor({4, 5}, rng);
  auto r = check_gradients({a, b}, [&] { return readout(nn::matmul(a, b)); });
  EXPECT_LT(r.max_rel_error, kTol);
  EXPECT_EQ(r.checked, 32u);
}

TEST(Gradients, LinearWithBias) {
  nn::Rng rng(2);
  Tensor x = random_tensor({4, 3}, rng), w = random_tensor({5, 3}, rng),
         b = random_tensor({5}, rng);
  EXPECT_LT(check_gradients({x, w, b}, [&] { return readout(nn::linear(x, w, b)); }).max_rel_error,
            kTol);
}

TEST(Gradients, AddAddRowScaleSum) {
  nn::Rng rng(3);
  Tensor a = random_tensor({3, 4}, rng), b = random_tensor({3, 4}, rng),
         row = random_tensor({4}, rng);
  auto f = [&] { return readout(nn::scale(nn::add_row(nn::add(a, b), row), -1.7)); };
  EXPECT_LT(check_gradients({a, b, row}, f).max_rel_error, kTol);
  EXPECT_LT(check_gradients({a}, [&] { return nn::sum(nn::scale(a, 3.0)); }).max_rel_error, kTol);
}

TEST(Gradients, AddBroadcastsSameTensorTwice) {
  nn::Rng rng(4);
  Tensor a = random_tensor({2, 3}, rng);
  EXPECT_LT(check_gradients({a}, [&] { return readout(nn::add(a, a)); }).max_rel_error, kTol);
}

TEST(Gradients, Relu) {
  nn::Rng rng(5);
  Tensor x = random_tensor({4, 6}, rng);
  // keep every entry away from the kink
  for (double& v : x.mutable_values()) v += (v >= 0 ? 0.1 : -0.1);
  EXPECT_LT(check_gradients({x}, [&] { return readout(nn::relu(x)); }).max_rel_error, kTol);
}

TEST(Gradients, DropoutWithFixedMask) {
  nn::Rng rng(6);
  Tensor x = random_tensor({4, 5}, rng);
  auto f = [&] {
    nn::Rng mask_rng(17);
    return readout(nn::dropout(x, 0.3, true, &mask_rng));
  };
  EXPECT_LT(check_gradients({x}, f).max_rel_error, kTol);
}

TEST(Gradients, LayerNorm) {
  nn::Rng rng(7);
  Tensor x = random_tensor({3, 6}, rng), g = random_tensor({6}, rng), b = random_tensor({6}, rng);
  EXPECT_LT(check_gradients({x, g, b}, [&] { return readout(nn::layer_norm(x, g, b)); })
                .max_rel_error,
            kTol);
}

TEST(Gradients, Attention) {
  nn::Rng rng(8);
  Tensor q = random_tensor({5, 4}, rng), k = random_tensor({5, 4}, rng),
         v = random_tensor({5, 4}, rng);
  for (bool causal : {false, true}) {
    auto f = [&] { return readout(nn::scaled_dot_attention(q, k, v, causal)); };
    EXPECT_LT(check_gradients({q, k, v}, f).max_rel_error, kTol) << "causal=" << causal;
  }
}

TEST(Gradients, MultiHeadAttention) {
  nn::Rng rng(9);
  Tensor q = random_tensor({4, 6}, rng), k = random_tensor({4, 6}, rng),
         v = random_tensor({4, 6}, rng);
  for (bool causal : {false, true}) {
    auto f = [&] { return readout(nn::multi_head_attention(q, k, v, 3, causal)); };
    EXPECT_LT(check_gradients({q, k, v}, f).max_rel_error, kTol) << "causal=" << causal;
  }
}

TEST(Gradients, CrossEntropyWithMask) {
  nn::Rng rng(10);
  Tensor logits = random_tensor({4, 5}, rng);
  const std::vector<int> targets{1, 0, 4, 2};
  const std::vector<bool> mask{true, false, true, true};
  auto f = [&] { return nn::cross_entropy(logits, targets, mask); };
  EXPECT_LT(check_gradients({logits}, f).max_rel_error, kTol);
}

TEST(Gradients, RowOps) {
  nn::Rng rng(11);
  Tensor a = random_tensor({2, 3}, rng), b = random_tensor({3, 3}, rng),
         table = random_tensor({5, 3}, rng), x = random_tensor({7, 2}, rng);
  const std::vector<Tensor> parts{a, b};
  EXPECT_LT(check_gradients({a, b}, [&] { return readout(nn::concat_rows(parts)); }).max_rel_error,
            kTol);
  const std::vector<int> ids{4, 0, 4, 2};
  EXPECT_LT(check_gradients({table}, [&] { return readout(nn::gather_rows(table, ids)); })
                .max_rel_error,
            kTol);
  EXPECT_LT(check_gradients({x}, [&] { return readout(nn::slice_rows(x, 2, 3)); }).max_rel_error,
            kTol);
  EXPECT_LT(check_gradients({x}, [&] { return readout(nn::stack_frames(x, 3)); }).max_rel_error,
            kTol);
}

// Per-head attention computed with plain loops.
std::vector<double> naive_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                                    std::size_t heads, bool causal) {
  const std::size_t t = q.rows(), d = q.cols(), dh = d / heads;
  std::vector<double> out(t * d, 0.0);
  for (std::size_t h = 0; h < heads; ++h) {
    for (std::size_t i = 0; i < t; ++i) {
      std::vector<double> s(t, -std::numeric_limits<double>::infinity());
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < t; ++j) {
        if (causal && j > i) continue;
        double dot = 0.0;
        for (std::size_t c = 0; c < dh; ++c) dot += q.at(i, h * dh + c) * k.at(j, h * dh + c);
        s[j] = dot / std::sqrt(static_cast<double>(dh));
        mx = std::max(mx, s[j]);
      }
      double z = 0.0;
      for (double& x : s) z += (x = std::exp(x - mx));
      for (std::size_t j = 0; j < t; ++j) {
        for (std::size_t c = 0; c < dh; ++c) out[i * d + h * dh + c] += s[j] / z * v.at(j, h * dh + c);
      }
    }
  }
  return out;
}

TEST(Attention, MatchesNaiveLoops) {
  nn::Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t heads = 1 + trial % 3, t = 2 + trial % 5;
    Tensor q = random_tensor({t, heads * 4}, rng, false), k = random_tensor({t, heads * 4}, rng, false),
           v = random_tensor({t, heads * 4}, rng, false);
    for (bool causal : {false, true}) {
      const Tensor y = nn::multi_head_attention(q, k, v, heads, causal);
      const auto want = naive_attention(q, k, v, heads, causal);
      for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(y.values()[i], want[i], 1e-12);
    }
  }
}

TEST(Attention, CausalFirstRowCopiesFirstValue) {
  nn::Rng rng(13);
  Tensor q = random_tensor({3, 4}, rng, false), k = random_tensor({3, 4}, rng, false),
         v = random_tensor({3, 4}, rng, false);
  const Tensor y = nn::scaled_dot_attention(q, k, v, true);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_DOUBLE_EQ(y.at(0, c), v.at(0, c));
}

TEST(LogSoftmax, MatchesDirectFormulaAndIsStable) {
  nn::Rng rng(14);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(7);
    for (double& v : x) v = n(rng);
    const auto ls = nn::log_softmax(x);
    double z = 0.0;
    for (double v : x) z += std::exp(v);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(ls[i], x[i] - std::log(z), 1e-12);
  }
  const auto big = nn::log_softmax(std::vector<double>{1000.0, 1000.0});
  EXPECT_NEAR(big[0], -std::log(2.0), 1e-12);
  EXPECT_TRUE(std::isfinite(big[1]));
}

TEST(LayerNorm, NormalizedRowStaysNormalized) {
  Tensor x = Tensor::from({1, 2}, {1.0, -1.0});
  Tensor y = nn::layer_norm(x, Tensor::full({2}, 1.0), Tensor::zeros({2}), 1e-12);
  EXPECT_NEAR(y.at(0, 0), 1.0, 1e-9);
  EXPECT_NEAR(y.at(0, 1), -1.0, 1e-9);
}

TEST(Tape, SecondBackwardIsRejected) {
  Tensor x = Tensor::from({1, 1}, {2.0}, true);
  nn::Tape tape;
  nn::TapeScope scope(tape);
  Tensor y = nn::sum(nn::scale(x, 3.0));
  tape.backward(y);
  EXPECT_DOUBLE_EQ(x.grad()[0], 3.0);
  try {
    tape.backward(y);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTapeConsumed);
  }
}

TEST(Tape, BackwardWithoutTapeIsRejected) {
  Tensor x = Tensor::from({1, 1}, {2.0}, true);
  Tensor y = nn::sum(x);
  nn::Tape tape;
  try {
    tape.backward(y);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNoTape);
  }
}

TEST(Tape, FrozenTensorsReceiveNoGradient) {
  nn::Rng rng(15);
  Tensor w = random_tensor({3, 3}, rng, false), x = random_tensor({2, 3}, rng, true);
  nn::Tape tape;
  nn::TapeScope scope(tape);
  tape.backward(readout(nn::linear(x, w)));
  EXPECT_FALSE(w.has_grad());
  EXPECT_TRUE(x.has_grad());
}

TEST(Checked, NonFiniteValuesRaise) {
  nn::CheckedScope checked;
  Tensor x = Tensor::from({1, 2}, {1e308, 1e308});
  try {
    (void)nn::scale(x, 10.0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumeric);
  }
}

TEST(Shapes, MismatchRaisesDimensionError) {
  Tensor a = Tensor::zeros({2, 3}), b = Tensor::zeros({2, 3});
  try {
    (void)nn::matmul(a, b);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimension);
  }
}

TEST(StackFrames, DropsIncompleteTrailingGroup) {
  Tensor x = Tensor::from({7, 1}, {0, 1, 2, 3, 4, 5, 6});
  Tensor y = nn::stack_frames(x, 3);
  ASSERT_EQ(y.rows(), 2u);
  ASSERT_EQ(y.cols(), 3u);
  EXPECT_DOUBLE_EQ(y.at(1, 0), 3.0);
  EXPECT_DOUBLE_EQ(y.at(1, 2), 5.0);
}

}  // namespace
}  // namespace slamprune
