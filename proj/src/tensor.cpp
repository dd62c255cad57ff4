// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "slamprune/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

namespace slamprune::nn {

namespace {

thread_local Tape* g_active_tape = nullptr;
thread_local bool g_checked = false;

using NodePtr = std::shared_ptr<detail::Node>;

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
  os << "]";
  return os.str();
}

void dim_error(const std::string& op, const std::string& detail) {
  fail(ErrorKind::kDimension, op + ": " + detail);
}

void require_matrix(const Tensor& t, const char* op) {
  if (!t.defined()) dim_error(op, "undefined tensor");
  if (t.dim() == 0) dim_error(op, "expected at least one axis");
}

bool recording(std::initializer_list<const Tensor*> inputs) {
  if (g_active_tape == nullptr) return false;
  for (const Tensor* t : inputs) {
    if (t->defined() && t->requires_grad()) return true;
  }
  return false;
}

void check_finite(const std::vector<double>& v, const char* op) {
  if (!g_checked) return;
  for (double x : v) {
    if (!std::isfinite(x)) {
      fail(ErrorKind::kNumeric, std::string(op) + ": non-finite value produced");
    }
  }
}

}  // namespace

Tensor make_result(Shape shape, std::vector<double> values, bool requires_grad);

Tensor make_result(Shape shape, std::vector<double> values, bool requires_grad) {
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

std::size_t numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double fill, bool requires_grad) {
  const std::size_t n = numel(shape);
  return make_result(std::move(shape), std::vector<double>(n, fill),
                     requires_grad);
}

Tensor Tensor::from(Shape shape, std::vector<double> values,
                    bool requires_grad) {
  if (numel(shape) != values.size()) {
    dim_error("Tensor::from", "shape " + shape_str(shape) + " holds " +
                                  std::to_string(numel(shape)) +
                                  " values, got " +
                                  std::to_string(values.size()));
  }
  return make_result(std::move(shape), std::move(values), requires_grad);
}

Tensor Tensor::scalar(double v, bool requires_grad) {
  return make_result({1}, {v}, requires_grad);
}

std::size_t Tensor::rows() const {
  const auto& s = node_->shape;
  if (s.empty()) return 1;
  return node_->value.size() / s.back();
}

std::size_t Tensor::cols() const {
  const auto& s = node_->shape;
  return s.empty() ? 1 : s.back();
}

double Tensor::item() const {
  if (size() != 1) dim_error("item", "tensor has " + std::to_string(size()) + " elements");
  return node_->value[0];
}

Tensor Tensor::clone() const {
  return make_result(node_->shape, node_->value, node_->requires_grad);
}

// ---- tape -------------------------------------------------------------

void Tape::record(std::function<void()> backward_fn) {
  if (consumed_) {
    fail(ErrorKind::kTapeConsumed, "tape already replayed; reset before recording");
  }
  entries_.push_back(std::move(backward_fn));
}

void Tape::backward(const Tensor& loss) {
  if (consumed_) {
    fail(ErrorKind::kTapeConsumed, "backward called twice without a new forward");
  }
  if (!loss.defined() || loss.size() != 1) {
    dim_error("backward", "loss must be a scalar");
  }
  if (!loss.requires_grad()) {
    fail(ErrorKind::kNoTape, "loss was not produced under an active tape");
  }
  loss.node()->ensure_grad();
  loss.node()->grad[0] += 1.0;
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) (*it)();
  entries_.clear();
  consumed_ = true;
}

void Tape::reset() {
  entries_.clear();
  consumed_ = false;
}

TapeScope::TapeScope(Tape& tape) : previous_(g_active_tape) {
  g_active_tape = &tape;
}
TapeScope::~TapeScope() { g_active_tape = previous_; }

Tape* active_tape() { return g_active_tape; }

CheckedScope::CheckedScope(bool enabled) : previous_(g_checked) {
  g_checked = enabled;
}
CheckedScope::~CheckedScope() { g_checked = previous_; }
bool checked_mode() { return g_checked; }

// ---- ops --------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  if (a.dim() != 2 || b.dim() != 2 || a.cols() != b.rows()) {
    dim_error("matmul", shape_str(a.shape()) + " x " + shape_str(b.shape()));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(m * n, 0.0);
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = &out[i * n];
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      const double* brow = &bv[p * n];
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
  check_finite(out, "matmul");
  const bool rec = recording({&a, &b});
  Tensor c = make_result({m, n}, std::move(out), rec);
  if (rec) {
    NodePtr an = a.node(), bn = b.node(), cn = c.node();
    active_tape()->record([an, bn, cn, m, k, n] {
      if (cn->grad.empty()) return;
      const auto& dc = cn->grad;
      if (an->requires_grad) {
        an->ensure_grad();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            double acc = 0.0;
            const double* brow = &bn->value[p * n];
            const double* drow = &dc[i * n];
            for (std::size_t j = 0; j < n; ++j) acc += drow[j] * brow[j];
            an->grad[i * k + p] += acc;
          }
        }
      }
      if (bn->requires_grad) {
        bn->ensure_grad();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t p = 0; p < k; ++p) {
            const double aip = an->value[i * k + p];
            double* grow = &bn->grad[p * n];
            const double* drow = &dc[i * n];
            for (std::size_t j = 0; j < n; ++j) grow[j] += aip * drow[j];
          }
        }
      }
    });
  }
  return c;
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& bias) {
  require_matrix(x, "linear");
  require_matrix(w, "linear");
  if (w.dim() != 2 || x.cols() != w.cols()) {
    dim_error("linear", "input " + shape_str(x.shape()) + " vs weight " +
                            shape_str(w.shape()));
  }
  const std::size_t m = x.rows(), in = x.cols(), out_dim = w.rows();
  if (bias.defined() && bias.size() != out_dim) {
    dim_error("linear", "bias " + shape_str(bias.shape()) + " vs out " +
                            std::to_string(out_dim));
  }
  std::vector<double> out(m * out_dim);
  const auto xv = x.values();
  const auto wv = w.values();
  for (std::size_t i = 0; i < m; ++i) {
    const double* xrow = &xv[i * in];
    for (std::size_t o = 0; o < out_dim; ++o) {
      const double* wrow = &wv[o * in];
      double acc = bias.defined() ? bias.values()[o] : 0.0;
      for (std::size_t p = 0; p < in; ++p) acc += xrow[p] * wrow[p];
      out[i * out_dim + o] = acc;
    }
  }
  check_finite(out, "linear");
  const bool rec = recording({&x, &w, &bias});
  Shape shape = x.shape();
  shape.back() = out_dim;
  Tensor y = make_result(std::move(shape), std::move(out), rec);
  if (rec) {
    NodePtr xn = x.node(), wn = w.node(), yn = y.node();
    NodePtr bn = bias.defined() ? bias.node() : nullptr;
    active_tape()->record([xn, wn, bn, yn, m, in, out_dim] {
      if (yn->grad.empty()) return;
      const auto& dy = yn->grad;
      if (xn->requires_grad) {
        xn->ensure_grad();
        for (std::size_t i = 0; i < m; ++i) {
          double* gx = &xn->grad[i * in];
          for (std::size_t o = 0; o < out_dim; ++o) {
            const double d = dy[i * out_dim + o];
            if (d == 0.0) continue;
            const double* wrow = &wn->value[o * in];
            for (std::size_t p = 0; p < in; ++p) gx[p] += d * wrow[p];
          }
        }
      }
      if (wn->requires_grad) {
        wn->ensure_grad();
        for (std::size_t i = 0; i < m; ++i) {
          const double* xrow = &xn->value[i * in];
          for (std::size_t o = 0; o < out_dim; ++o) {
            const double d = dy[i * out_dim + o];
            if (d == 0.0) continue;
            double* gw = &wn->grad[o * in];
            for (std::size_t p = 0; p < in; ++p) gw[p] += d * xrow[p];
          }
        }
      }
      if (bn && bn->requires_grad) {
        bn->ensure_grad();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t o = 0; o < out_dim; ++o) bn->grad[o] += dy[i * out_dim + o];
        }
      }
    });
  }
  return y;
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    dim_error("add", shape_str(a.shape()) + " + " + shape_str(b.shape()));
  }
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + b.values()[i];
  check_finite(out, "add");
  const bool rec = recording({&a, &b});
  Tensor c = make_result(a.shape(), std::move(out), rec);
  if (rec) {
    NodePtr an = a.node(), bn = b.node(), cn = c.node();
    active_tape()->record([an, bn, cn] {
      if (cn->grad.empty()) return;
      for (const NodePtr& in : {an, bn}) {
        if (!in->requires_grad) continue;
        in->ensure_grad();
        for (std::size_t i = 0; i < cn->grad.size(); ++i) in->grad[i] += cn->grad[i];
      }
    });
  }
  return c;
}

Tensor add_row(const Tensor& x, const Tensor& row) {
  require_matrix(x, "add_row");
  if (row.size() != x.cols()) {
    dim_error("add_row", shape_str(x.shape()) + " + row " + shape_str(row.shape()));
  }
  const std::size_t m = x.rows(), n = x.cols();
  std::vector<double> out(x.values().begin(), x.values().end());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] += row.values()[j];
  }
  check_finite(out, "add_row");
  const bool rec = recording({&x, &row});
  Tensor y = make_result(x.shape(), std::move(out), rec);
  if (rec) {
    NodePtr xn = x.node(), rn = row.node(), yn = y.node();
    active_tape()->record([xn, rn, yn, m, n] {
      if (yn->grad.empty()) return;
      if (xn->requires_grad) {
        xn->ensure_grad();
        for (std::size_t i = 0; i < yn->grad.size(); ++i) xn->grad[i] += yn->grad[i];
      }
      if (rn->requires_grad) {
        rn->ensure_grad();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < n; ++j) rn->grad[j] += yn->grad[i * n + j];
        }
      }
    });
  }
  return y;
}

Tensor scale(const Tensor& x, double factor) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.values()[i] * factor;
  check_finite(out, "scale");
  const bool rec = recording({&x});
  Tensor y = make_result(x.shape(), std::move(out), rec);
  if (rec) {
    NodePtr xn = x.node(), yn = y.node();
    active_tape()->record([xn, yn, factor] {
      if (yn->grad.empty()) return;
      xn->ensure_grad();
      for (std::size_t i = 0; i < yn->grad.size(); ++i) xn->grad[i] += factor * yn->grad[i];
    });
  }
  return y;
}

Tensor relu(const Tensor& x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, x.values()[i]);
  const bool rec = recording({&x});
  Tensor y = make_result(x.shape(), std::move(out), rec);
  if (rec) {
    NodePtr xn = x.node(), yn = y.node();
    active_tape()->record([xn, yn] {
      if (yn->grad.empty()) return;
      xn->ensure_grad();
      for (std::size_t i = 0; i < yn->grad.size(); ++i) {
        if (xn->value[i] > 0.0) xn->grad[i] += yn->grad[i];
      }
    });
  }
  return y;
}

Tensor dropout(const Tensor& x, double p, bool train, Rng* rng) {
  if (!train || p <= 0.0) return x;
  if (p >= 1.0) fail(ErrorKind::kDimension, "dropout: p must be < 1");
  if (rng == nullptr) fail(ErrorKind::kDimension, "dropout: training mode needs an rng");
  std::bernoulli_distribution keep(1.0 - p);
  const double inv = 1.0 / (1.0 - p);
  std::vector<double> mask(x.size());
  for (double& m : mask) m = keep(*rng) ? inv : 0.0;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.values()[i] * mask[i];
  const bool rec = recording({&x});
  Tensor y = make_result(x.shape(), std::move(out), rec);
  if (rec) {
    NodePtr xn = x.node(), yn = y.node();
    active_tape()->record([xn, yn, mask = std::move(mask)] {
      if (yn->grad.empty()) return;
      xn->ensure_grad();
      for (std::size_t i = 0; i < yn->grad.size(); ++i) xn->grad[i] += mask[i] * yn->grad[i];
    });
  }
  return y;
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps) {
  require_matrix(x, "layer_norm");
  const std::size_t d = x.cols();
  if (d == 0) dim_error("layer_norm", "last axis is empty");
  if (gain.size() != d || bias.size() != d) {
    dim_error("layer_norm", "gain/bias must have " + std::to_string(d) + " entries");
  }
  if (!(eps > 0.0)) dim_error("layer_norm", "eps must be positive");
  const std::size_t m = x.rows();
  std::vector<double> xhat(x.size());
  std::vector<double> inv_std(m);
  std::vector<double> out(x.size());
  const auto xv = x.values();
  const auto gv = gain.values();
  const auto bv = bias.values();
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = &xv[i * d];
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += row[j];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (row[j] - mean) * (row[j] - mean);
    var /= static_cast<double>(d);
    const double is = 1.0 / std::sqrt(var + eps);
    inv_std[i] = is;
    for (std::size_t j = 0; j < d; ++j) {
      const double h = (row[j] - mean) * is;
      xhat[i * d + j] = h;
      out[i * d + j] = h * gv[j] + bv[j];
    }
  }
  check_finite(out, "layer_norm");
  const bool rec = recording({&x, &gain, &bias});
  Tensor y = make_result(x.shape(), std::move(out), rec);
  if (rec) {
    NodePtr xn = x.node(), gn = gain.node(), bn = bias.node(), yn = y.node();
    active_tape()->record([xn, gn, bn, yn, m, d, xhat = std::move(xhat),
                           inv_std = std::move(inv_std)] {
      if (yn->grad.empty()) return;
      const auto& dy = yn->grad;
      if (gn->requires_grad) {
        gn->ensure_grad();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < d; ++j) gn->grad[j] += dy[i * d + j] * xhat[i * d + j];
        }
      }
      if (bn->requires_grad) {
        bn->ensure_grad();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < d; ++j) bn->grad[j] += dy[i * d + j];
        }
      }
      if (xn->requires_grad) {
        xn->ensure_grad();
        const double inv_d = 1.0 / static_cast<double>(d);
        for (std::size_t i = 0; i < m; ++i) {
          double mean_dh = 0.0, mean_dh_h = 0.0;
          for (std::size_t j = 0; j < d; ++j) {
            const double dh = dy[i * d + j] * gn->value[j];
            mean_dh += dh;
            mean_dh_h += dh * xhat[i * d + j];
          }
          mean_dh *= inv_d;
          mean_dh_h *= inv_d;
          for (std::size_t j = 0; j < d; ++j) {
            const double dh = dy[i * d + j] * gn->value[j];
            xn->grad[i * d + j] +=
                inv_std[i] * (dh - mean_dh - xhat[i * d + j] * mean_dh_h);
          }
        }
      }
    });
  }
  return y;
}

Tensor scaled_dot_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                            bool causal) {
  return multi_head_attention(q, k, v, 1, causal);
}

Tensor multi_head_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                            std::size_t num_heads, bool causal) {
  require_matrix(q, "attention");
  if (q.dim() != 2 || q.shape() != k.shape() || q.shape() != v.shape()) {
    dim_error("attention", "q/k/v shapes must match: " + shape_str(q.shape()) +
                               ", " + shape_str(k.shape()) + ", " +
                               shape_str(v.shape()));
  }
  const std::size_t t = q.rows(), d = q.cols();
  if (num_heads == 0 || d % num_heads != 0) {
    dim_error("attention", "width " + std::to_string(d) + " not divisible by " +
                               std::to_string(num_heads) + " heads");
  }
  const std::size_t dh = d / num_heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  // probs[h][i][j]
  std::vector<double> probs(num_heads * t * t, 0.0);
  std::vector<double> out(t * d, 0.0);
  const auto qv = q.values(), kv = k.values(), vv = v.values();
  for (std::size_t h = 0; h < num_heads; ++h) {
    const std::size_t off = h * dh;
    for (std::size_t i = 0; i < t; ++i) {
      double* p = &probs[(h * t + i) * t];
      const std::size_t jmax = causal ? i + 1 : t;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < jmax; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < dh; ++c) s += qv[i * d + off + c] * kv[j * d + off + c];
        p[j] = s * inv_sqrt;
        mx = std::max(mx, p[j]);
      }
      double z = 0.0;
      for (std::size_t j = 0; j < jmax; ++j) {
        p[j] = std::exp(p[j] - mx);
        z += p[j];
      }
      for (std::size_t j = 0; j < jmax; ++j) p[j] /= z;
      double* orow = &out[i * d + off];
      for (std::size_t j = 0; j < jmax; ++j) {
        const double pj = p[j];
        const double* vrow = &vv[j * d + off];
        for (std::size_t c = 0; c < dh; ++c) orow[c] += pj * vrow[c];
      }
    }
  }
  check_finite(out, "attention");
  const bool rec = recording({&q, &k, &v});
  Tensor y = make_result({t, d}, std::move(out), rec);
  if (rec) {
    NodePtr qn = q.node(), kn = k.node(), vn = v.node(), yn = y.node();
    active_tape()->record([qn, kn, vn, yn, t, d, dh, num_heads, causal, inv_sqrt,
                           probs = std::move(probs)] {
      if (yn->grad.empty()) return;
      const auto& dy = yn->grad;
      for (const NodePtr& n : {qn, kn, vn}) {
        if (n->requires_grad) n->ensure_grad();
      }
      std::vector<double> dp(t);
      for (std::size_t h = 0; h < num_heads; ++h) {
        const std::size_t off = h * dh;
        for (std::size_t i = 0; i < t; ++i) {
          const double* p = &probs[(h * t + i) * t];
          const std::size_t jmax = causal ? i + 1 : t;
          const double* dyrow = &dy[i * d + off];
          double dot = 0.0;
          for (std::size_t j = 0; j < jmax; ++j) {
            double s = 0.0;
            const double* vrow = &vn->value[j * d + off];
            for (std::size_t c = 0; c < dh; ++c) s += dyrow[c] * vrow[c];
            dp[j] = s;
            dot += s * p[j];
            if (vn->requires_grad) {
              double* gv = &vn->grad[j * d + off];
              for (std::size_t c = 0; c < dh; ++c) gv[c] += p[j] * dyrow[c];
            }
          }
          for (std::size_t j = 0; j < jmax; ++j) {
            const double ds = p[j] * (dp[j] - dot) * inv_sqrt;
            if (ds == 0.0) continue;
            if (qn->requires_grad) {
              double* gq = &qn->grad[i * d + off];
              const double* krow = &kn->value[j * d + off];
              for (std::size_t c = 0; c < dh; ++c) gq[c] += ds * krow[c];
            }
            if (kn->requires_grad) {
              double* gk = &kn->grad[j * d + off];
              const double* qrow = &qn->value[i * d + off];
              for (std::size_t c = 0; c < dh; ++c) gk[c] += ds * qrow[c];
            }
          }
        }
      }
    });
  }
  return y;
}

Tensor cross_entropy(const Tensor& logits, std::span<const int> targets,
                     const std::vector<bool>& mask) {
  require_matrix(logits, "cross_entropy");
  const std::size_t t = logits.rows(), vocab = logits.cols();
  if (targets.size() != t || mask.size() != t) {
    dim_error("cross_entropy", "targets/mask length must equal " + std::to_string(t));
  }
  std::size_t count = 0;
  for (std::size_t i = 0; i < t; ++i) {
    if (!mask[i]) continue;
    if (targets[i] < 0 || static_cast<std::size_t>(targets[i]) >= vocab) {
      dim_error("cross_entropy", "target id " + std::to_string(targets[i]) +
                                     " outside vocabulary of " + std::to_string(vocab));
    }
    ++count;
  }
  if (count == 0) fail(ErrorKind::kDegenerateLoss, "cross_entropy: every position is masked");
  std::vector<double> soft(t * vocab, 0.0);
  double loss = 0.0;
  const auto lv = logits.values();
  for (std::size_t i = 0; i < t; ++i) {
    if (!mask[i]) continue;
    const double* row = &lv[i * vocab];
    const double mx = *std::max_element(row, row + vocab);
    double z = 0.0;
    for (std::size_t j = 0; j < vocab; ++j) z += std::exp(row[j] - mx);
    const double lse = mx + std::log(z);
    loss += lse - row[targets[i]];
    for (std::size_t j = 0; j < vocab; ++j) soft[i * vocab + j] = std::exp(row[j] - lse);
  }
  loss /= static_cast<double>(count);
  if (g_checked && !std::isfinite(loss)) fail(ErrorKind::kNumeric, "cross_entropy: non-finite loss");
  const bool rec = recording({&logits});
  Tensor y = make_result({1}, {loss}, rec);
  if (rec) {
    NodePtr ln = logits.node(), yn = y.node();
    std::vector<int> tg(targets.begin(), targets.end());
    active_tape()->record([ln, yn, t, vocab, count, mask, tg = std::move(tg),
                           soft = std::move(soft)] {
      if (yn->grad.empty()) return;
      ln->ensure_grad();
      const double g = yn->grad[0] / static_cast<double>(count);
      for (std::size_t i = 0; i < t; ++i) {
        if (!mask[i]) continue;
        for (std::size_t j = 0; j < vocab; ++j) ln->grad[i * vocab + j] += g * soft[i * vocab + j];
        ln->grad[i * vocab + tg[i]] -= g;
      }
    });
  }
  return y;
}

Tensor concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) dim_error("concat_rows", "no inputs");
  const std::size_t n = parts.front().cols();
  std::size_t total = 0;
  bool rec = false;
  for (const Tensor& p : parts) {
    require_matrix(p, "concat_rows");
    if (p.cols() != n) dim_error("concat_rows", "column widths differ");
    total += p.rows();
    rec = rec || recording({&p});
  }
  std::vector<double> out;
  out.reserve(total * n);
  for (const Tensor& p : parts) out.insert(out.end(), p.values().begin(), p.values().end());
  Tensor y = make_result({total, n}, std::move(out), rec);
  if (rec) {
    std::vector<NodePtr> nodes;
    for (const Tensor& p : parts) nodes.push_back(p.node());
    NodePtr yn = y.node();
    active_tape()->record([nodes = std::move(nodes), yn] {
      if (yn->grad.empty()) return;
      std::size_t off = 0;
      for (const NodePtr& in : nodes) {
        if (in->requires_grad) {
          in->ensure_grad();
          for (std::size_t i = 0; i < in->value.size(); ++i) in->grad[i] += yn->grad[off + i];
        }
        off += in->value.size();
      }
    });
  }
  return y;
}

Tensor gather_rows(const Tensor& table, std::span<const int> ids) {
  require_matrix(table, "gather_rows");
  const std::size_t rows = table.rows(), n = table.cols();
  std::vector<double> out(ids.size() * n);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= rows) {
      dim_error("gather_rows", "row id " + std::to_string(ids[i]) + " out of range");
    }
    std::copy_n(&table.values()[ids[i] * n], n, &out[i * n]);
  }
  const bool rec = recording({&table});
  Tensor y = make_result({ids.size(), n}, std::move(out), rec);
  if (rec) {
    NodePtr tn = table.node(), yn = y.node();
    std::vector<int> idv(ids.begin(), ids.end());
    active_tape()->record([tn, yn, n, idv = std::move(idv)] {
      if (yn->grad.empty()) return;
      tn->ensure_grad();
      for (std::size_t i = 0; i < idv.size(); ++i) {
        for (std::size_t j = 0; j < n; ++j) tn->grad[idv[i] * n + j] += yn->grad[i * n + j];
      }
    });
  }
  return y;
}

Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t count) {
  require_matrix(x, "slice_rows");
  if (begin + count > x.rows()) dim_error("slice_rows", "range exceeds rows");
  const std::size_t n = x.cols();
  std::vector<double> out(x.values().begin() + begin * n,
                          x.values().begin() + (begin + count) * n);
  const bool rec = recording({&x});
  Tensor y = make_result({count, n}, std::move(out), rec);
  if (rec) {
    NodePtr xn = x.node(), yn = y.node();
    active_tape()->record([xn, yn, begin, n] {
      if (yn->grad.empty()) return;
      xn->ensure_grad();
      for (std::size_t i = 0; i < yn->grad.size(); ++i) xn->grad[begin * n + i] += yn->grad[i];
    });
  }
  return y;
}

Tensor stack_frames(const Tensor& x, std::size_t factor) {
  require_matrix(x, "stack_frames");
  if (factor == 0) dim_error("stack_frames", "factor must be positive");
  const std::size_t groups = x.rows() / factor, n = x.cols();
  std::vector<double> out(x.values().begin(),
                          x.values().begin() + groups * factor * n);
  const bool rec = recording({&x});
  Tensor y = make_result({groups, factor * n}, std::move(out), rec);
  if (rec) {
    NodePtr xn = x.node(), yn = y.node();
    active_tape()->record([xn, yn] {
      if (yn->grad.empty()) return;
      xn->ensure_grad();
      for (std::size_t i = 0; i < yn->grad.size(); ++i) xn->grad[i] += yn->grad[i];
    });
  }
  return y;
}

Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.values()) s += v;
  const bool rec = recording({&x});
  Tensor y = make_result({1}, {s}, rec);
  if (rec) {
    NodePtr xn = x.node(), yn = y.node();
    active_tape()->record([xn, yn] {
      if (yn->grad.empty()) return;
      xn->ensure_grad();
      for (double& g : xn->grad) g += yn->grad[0];
    });
  }
  return y;
}

Tensor glorot_uniform(std::size_t fan_out, std::size_t fan_in, Rng& rng,
                      bool requires_grad) {
  const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-s, s);
  std::vector<double> v(fan_out * fan_in);
  for (double& x : v) x = dist(rng);
  return Tensor::from({fan_out, fan_in}, std::move(v), requires_grad);
}

std::vector<double> log_softmax(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - mx);
  const double lse = mx + std::log(z);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

}  // namespace slamprune::nn
