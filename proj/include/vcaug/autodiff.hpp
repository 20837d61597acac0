// Copyright (c) 2026 The vcaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Reverse-mode autodiff on dense Eigen matrices. Define-by-run tape:
// creation order is a valid topological order, so backward() is a single
// reverse sweep. Templated on scalar so the same model code runs in
// float for training and double for finite-difference checks.

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "vcaug/common.hpp"

namespace vcaug {

template <typename S>
struct Parameter {
  std::string name;
  Mat<S> value;
  Mat<S> grad;

  void init_zero(Eigen::Index r, Eigen::Index c, std::string n) {
    name = std::move(n);
    value = Mat<S>::Zero(r, c);
    grad = Mat<S>::Zero(r, c);
  }
  void zero_grad() { grad.setZero(); }
  Eigen::Index size() const { return value.size(); }
};

template <typename S>
class Tape;

template <typename S>
struct Var {
  Tape<S>* tape = nullptr;
  int id = -1;

  bool valid() const { return tape != nullptr && id >= 0; }
  const Mat<S>& val() const;
  Eigen::Index rows() const { return val().rows(); }
  Eigen::Index cols() const { return val().cols(); }
};

template <typename S>
class Tape {
 public:
  Var<S> constant(Mat<S> v) { return push(std::move(v), false, nullptr); }

  Var<S> input(Mat<S> v, bool track_grad = false) {
    return push(std::move(v), track_grad, nullptr);
  }

  Var<S> param(Parameter<S>& p) { return push(p.value, true, &p); }

  const Mat<S>& value(Var<S> v) const { return nodes_[v.id].value; }

  // Gradient of a node after backward(); zero matrix if untouched.
  Mat<S> grad(Var<S> v) const {
    const Node& n = nodes_[v.id];
    if (n.grad.size() == 0) return Mat<S>::Zero(n.value.rows(), n.value.cols());
    return n.grad;
  }

  Var<S> detach(Var<S> a) { return constant(nodes_[a.id].value); }

  // ----- arithmetic -----

  Var<S> add(Var<S> a, Var<S> b) {
    Var<S> out = push(val(a) + val(b), track(a) || track(b), nullptr);
    record(out, [=](Tape& t) {
      const Mat<S>& g = t.nodes_[out.id].grad;
      if (t.track(a)) t.grad_ref(a) += g;
      if (t.track(b)) t.grad_ref(b) += g;
    });
    return out;
  }

  Var<S> sub(Var<S> a, Var<S> b) {
    Var<S> out = push(val(a) - val(b), track(a) || track(b), nullptr);
    record(out, [=](Tape& t) {
      const Mat<S>& g = t.nodes_[out.id].grad;
      if (t.track(a)) t.grad_ref(a) += g;
      if (t.track(b)) t.grad_ref(b) -= g;
    });
    return out;
  }

  Var<S> mul(Var<S> a, Var<S> b) {
    Var<S> out =
        push(val(a).cwiseProduct(val(b)), track(a) || track(b), nullptr);
    record(out, [=](Tape& t) {
      const Mat<S>& g = t.nodes_[out.id].grad;
      if (t.track(a)) t.grad_ref(a) += g.cwiseProduct(t.val(b));
      if (t.track(b)) t.grad_ref(b) += g.cwiseProduct(t.val(a));
    });
    return out;
  }

  Var<S> scale(Var<S> a, S k) {
    Var<S> out = push(val(a) * k, track(a), nullptr);
    record(out, [=](Tape& t) {
      if (t.track(a)) t.grad_ref(a) += t.nodes_[out.id].grad * k;
    });
    return out;
  }

  Var<S> matmul(Var<S> a, Var<S> b) {
    require(val(a).cols() == val(b).rows(), "matmul: inner dim mismatch");
    Var<S> out = push(val(a) * val(b), track(a) || track(b), nullptr);
    record(out, [=](Tape& t) {
      const Mat<S>& g = t.nodes_[out.id].grad;
      if (t.track(a)) t.grad_ref(a) += g * t.val(b).transpose();
      if (t.track(b)) t.grad_ref(b) += t.val(a).transpose() * g;
    });
    return out;
  }

  // a [T x C] + row [1 x C] broadcast over rows.
  Var<S> add_row(Var<S> a, Var<S> r) {
    require(val(a).cols() == val(r).cols() && val(r).rows() == 1,
            "add_row: shape mismatch");
    Mat<S> v = val(a);
    v.rowwise() += val(r).row(0);
    Var<S> out = push(std::move(v), track(a) || track(r), nullptr);
    record(out, [=](Tape& t) {
      const Mat<S>& g = t.nodes_[out.id].grad;
      if (t.track(a)) t.grad_ref(a) += g;
      if (t.track(r)) t.grad_ref(r) += g.colwise().sum();
    });
    return out;
  }

  Var<S> tanh_(Var<S> a) {
    Mat<S> y = val(a).array().tanh().matrix();
    Var<S> out = push(std::move(y), track(a), nullptr);
    record(out, [=](Tape& t) {
      if (!t.track(a)) return;
      const Mat<S>& yv = t.nodes_[out.id].value;
      t.grad_ref(a) += t.nodes_[out.id]
                           .grad.array()
                           .cwiseProduct(S(1) - yv.array().square())
                           .matrix();
    });
    return out;
  }

  Var<S> sigmoid(Var<S> a) {
    Mat<S> y =
        (S(1) / (S(1) + (-val(a).array()).exp())).matrix();
    Var<S> out = push(std::move(y), track(a), nullptr);
    record(out, [=](Tape& t) {
      if (!t.track(a)) return;
      const auto& yv = t.nodes_[out.id].value.array();
      t.grad_ref(a) += (t.nodes_[out.id].grad.array() * yv * (S(1) - yv))
                           .matrix();
    });
    return out;
  }

  Var<S> relu(Var<S> a) {
    Mat<S> y = val(a).cwiseMax(S(0));
    Var<S> out = push(std::move(y), track(a), nullptr);
    record(out, [=](Tape& t) {
      if (!t.track(a)) return;
      const auto mask =
          (t.val(a).array() > S(0)).template cast<S>();
      t.grad_ref(a) += (t.nodes_[out.id].grad.array() * mask).matrix();
    });
    return out;
  }

  Var<S> softmax_rows(Var<S> a) {
    Mat<S> y = val(a);
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      const S mx = y.row(i).maxCoeff();
      y.row(i) = (y.row(i).array() - mx).exp();
      y.row(i) /= y.row(i).sum();
    }
    Var<S> out = push(std::move(y), track(a), nullptr);
    record(out, [=](Tape& t) {
      if (!t.track(a)) return;
      const Mat<S>& yv = t.nodes_[out.id].value;
      const Mat<S>& g = t.nodes_[out.id].grad;
      Mat<S>& da = t.grad_ref(a);
      for (Eigen::Index i = 0; i < yv.rows(); ++i) {
        const S dot = g.row(i).cwiseProduct(yv.row(i)).sum();
        const RowVec<S> adj = (g.row(i).array() - dot).matrix();
        da.row(i) += yv.row(i).cwiseProduct(adj);
      }
    });
    return out;
  }

  Var<S> sum_all(Var<S> a) {
    Mat<S> y(1, 1);
    y(0, 0) = val(a).sum();
    Var<S> out = push(std::move(y), track(a), nullptr);
    record(out, [=](Tape& t) {
      if (!t.track(a)) return;
      t.grad_ref(a).array() += t.nodes_[out.id].grad(0, 0);
    });
    return out;
  }

  Var<S> mean_all(Var<S> a) {
    const S n = static_cast<S>(val(a).size());
    Mat<S> y(1, 1);
    y(0, 0) = val(a).sum() / n;
    Var<S> out = push(std::move(y), track(a), nullptr);
    record(out, [=](Tape& t) {
      if (!t.track(a)) return;
      t.grad_ref(a).array() += t.nodes_[out.id].grad(0, 0) / n;
    });
    return out;
  }

  // mean((a - target)^2) over all entries.
  Var<S> mse(Var<S> a, const Mat<S>& target) {
    require(val(a).rows() == target.rows() && val(a).cols() == target.cols(),
            "mse: shape mismatch");
    const S n = static_cast<S>(target.size());
    Mat<S> diff = val(a) - target;
    Mat<S> y(1, 1);
    y(0, 0) = diff.squaredNorm() / n;
    Var<S> out = push(std::move(y), track(a), nullptr);
    record(out, [=, d = std::move(diff)](Tape& t) {
      if (!t.track(a)) return;
      t.grad_ref(a) += (S(2) / n) * t.nodes_[out.id].grad(0, 0) * d;
    });
    return out;
  }

  // Weighted mean binary cross-entropy on logits z [n x 1]; targets in
  // {0,1}; positive class weighted by pos_weight.
  Var<S> bce_logits(Var<S> z, const Vec<S>& targets, S pos_weight) {
    require(val(z).cols() == 1 && val(z).rows() == targets.size(),
            "bce_logits: shape mismatch");
    const Eigen::Index n = targets.size();
    auto softplus = [](S x) {
      return std::max(x, S(0)) + std::log1p(std::exp(-std::abs(x)));
    };
    Mat<S> y(1, 1);
    S acc = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const S zi = val(z)(i, 0);
      const S w = targets[i] > S(0.5) ? pos_weight : S(1);
      acc += targets[i] > S(0.5) ? w * softplus(-zi) : w * softplus(zi);
    }
    y(0, 0) = acc / static_cast<S>(n);
    Var<S> out = push(std::move(y), track(z), nullptr);
    record(out, [=](Tape& t) {
      if (!t.track(z)) return;
      const S g = t.nodes_[out.id].grad(0, 0) / static_cast<S>(n);
      Mat<S>& dz = t.grad_ref(z);
      for (Eigen::Index i = 0; i < n; ++i) {
        const S zi = t.val(z)(i, 0);
        const S sig = S(1) / (S(1) + std::exp(-zi));
        if (targets[i] > S(0.5)) {
          dz(i, 0) += g * pos_weight * (sig - S(1));
        } else {
          dz(i, 0) += g * sig;
        }
      }
    });
    return out;
  }

  Var<S> concat_cols(Var<S> a, Var<S> b) {
    require(val(a).rows() == val(b).rows(), "concat_cols: row mismatch");
    Mat<S> y(val(a).rows(), val(a).cols() + val(b).cols());
    y << val(a), val(b);
    const Eigen::Index ca = val(a).cols(), cb = val(b).cols();
    Var<S> out = push(std::move(y), track(a) || track(b), nullptr);
    record(out, [=](Tape& t) {
      const Mat<S>& g = t.nodes_[out.id].grad;
      if (t.track(a)) t.grad_ref(a) += g.leftCols(ca);
      if (t.track(b)) t.grad_ref(b) += g.rightCols(cb);
    });
    return out;
  }

  Var<S> concat_rows(const std::vector<Var<S>>& parts) {
    require(!parts.empty(), "concat_rows: empty");
    Eigen::Index rows = 0;
    const Eigen::Index cols = val(parts[0]).cols();
    bool any = false;
    for (const auto& p : parts) {
      require(val(p).cols() == cols, "concat_rows: col mismatch");
      rows += val(p).rows();
      any = any || track(p);
    }
    Mat<S> y(rows, cols);
    Eigen::Index r = 0;
    for (const auto& p : parts) {
      y.middleRows(r, val(p).rows()) = val(p);
      r += val(p).rows();
    }
    Var<S> out = push(std::move(y), any, nullptr);
    record(out, [=](Tape& t) {
      const Mat<S>& g = t.nodes_[out.id].grad;
      Eigen::Index at = 0;
      for (const auto& p : parts) {
        const Eigen::Index nr = t.val(p).rows();
        if (t.track(p)) t.grad_ref(p) += g.middleRows(at, nr);
        at += nr;
      }
    });
    return out;
  }

  Var<S> slice_cols(Var<S> a, Eigen::Index start, Eigen::Index n) {
    Var<S> out = push(Mat<S>(val(a).middleCols(start, n)), track(a), nullptr);
    record(out, [=](Tape& t) {
      if (t.track(a))
        t.grad_ref(a).middleCols(start, n) += t.nodes_[out.id].grad;
    });
    return out;
  }

  Var<S> slice_rows(Var<S> a, Eigen::Index start, Eigen::Index n) {
    Var<S> out = push(Mat<S>(val(a).middleRows(start, n)), track(a), nullptr);
    record(out, [=](Tape& t) {
      if (t.track(a))
        t.grad_ref(a).middleRows(start, n) += t.nodes_[out.id].grad;
    });
    return out;
  }

  Var<S> row(Var<S> a, Eigen::Index r) { return slice_rows(a, r, 1); }

  Var<S> transpose(Var<S> a) {
    Var<S> out = push(Mat<S>(val(a).transpose()), track(a), nullptr);
    record(out, [=](Tape& t) {
      if (t.track(a)) t.grad_ref(a) += t.nodes_[out.id].grad.transpose();
    });
    return out;
  }

  // 1-D convolution along rows with 'same' centering.
  // x [T x Cin], w [(kernel*Cin) x Cout], b [1 x Cout];
  // out[t] = sum_j x[t*stride + j - pad] * w_block(j), pad = (kernel-1)/2,
  // T_out = ceil(T / stride). Out-of-range taps are zero.
  Var<S> conv1d(Var<S> x, Var<S> w, Var<S> b, int kernel, int stride) {
    const Eigen::Index T = val(x).rows();
    const Eigen::Index cin = val(x).cols();
    require(val(w).rows() == kernel * cin, "conv1d: weight shape mismatch");
    const Eigen::Index cout = val(w).cols();
    require(val(b).rows() == 1 && val(b).cols() == cout,
            "conv1d: bias shape mismatch");
    const int pad = (kernel - 1) / 2;
    const Eigen::Index t_out = (T + stride - 1) / stride;

    Mat<S> patches = Mat<S>::Zero(t_out, kernel * cin);
    for (Eigen::Index t = 0; t < t_out; ++t) {
      for (int j = 0; j < kernel; ++j) {
        const Eigen::Index src = t * stride + j - pad;
        if (src >= 0 && src < T)
          patches.block(t, j * cin, 1, cin) = val(x).row(src);
      }
    }
    Mat<S> y = patches * val(w);
    y.rowwise() += val(b).row(0);
    Var<S> out =
        push(std::move(y), track(x) || track(w) || track(b), nullptr);
    record(out, [=, P = std::move(patches)](Tape& t) {
      const Mat<S>& g = t.nodes_[out.id].grad;
      if (t.track(w)) t.grad_ref(w) += P.transpose() * g;
      if (t.track(b)) t.grad_ref(b) += g.colwise().sum();
      if (t.track(x)) {
        Mat<S> dP = g * t.val(w).transpose();  // [t_out x kernel*cin]
        Mat<S>& dx = t.grad_ref(x);
        for (Eigen::Index ti = 0; ti < dP.rows(); ++ti) {
          for (int j = 0; j < kernel; ++j) {
            const Eigen::Index src = ti * stride + j - pad;
            if (src >= 0 && src < T)
              dx.row(src) += dP.block(ti, j * cin, 1, cin);
          }
        }
      }
    });
    return out;
  }

  // Per-row layer normalization with learned gain/bias [1 x C].
  Var<S> layer_norm(Var<S> x, Var<S> gain, Var<S> bias,
                    S eps = S(1e-5)) {
    const Eigen::Index C = val(x).cols();
    require(val(gain).cols() == C && val(bias).cols() == C,
            "layer_norm: gain/bias shape mismatch");
    const Eigen::Index T = val(x).rows();
    Mat<S> xhat(T, C);
    Vec<S> inv_sigma(T);
    for (Eigen::Index i = 0; i < T; ++i) {
      const S mu = val(x).row(i).mean();
      const S var = (val(x).row(i).array() - mu).square().mean();
      const S is = S(1) / std::sqrt(var + eps);
      inv_sigma[i] = is;
      xhat.row(i) = ((val(x).row(i).array() - mu) * is).matrix();
    }
    Mat<S> y = xhat;
    for (Eigen::Index i = 0; i < T; ++i)
      y.row(i) = y.row(i).cwiseProduct(val(gain).row(0)) + val(bias).row(0);
    Var<S> out = push(std::move(y),
                      track(x) || track(gain) || track(bias), nullptr);
    record(out, [=, xh = std::move(xhat), is = std::move(inv_sigma)](Tape& t) {
      const Mat<S>& g = t.nodes_[out.id].grad;
      if (t.track(gain)) t.grad_ref(gain) += g.cwiseProduct(xh).colwise().sum();
      if (t.track(bias)) t.grad_ref(bias) += g.colwise().sum();
      if (t.track(x)) {
        Mat<S>& dx = t.grad_ref(x);
        const S n = static_cast<S>(C);
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
          RowVec<S> dxh = g.row(i).cwiseProduct(t.val(gain).row(0));
          const S m1 = dxh.mean();
          const S m2 = dxh.cwiseProduct(xh.row(i)).mean();
          dx.row(i) +=
              is[i] * (dxh.array() - m1 - xh.row(i).array() * m2).matrix();
          (void)n;
        }
      }
    });
    return out;
  }

  // Reverse sweep from a scalar (1x1) loss.
  void backward(Var<S> loss) {
    require(val(loss).rows() == 1 && val(loss).cols() == 1,
            "backward: loss must be scalar");
    grad_ref(loss)(0, 0) += S(1);
    for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
      Node& n = nodes_[i];
      if (!n.requires_grad || n.grad.size() == 0 || !n.backward) continue;
      n.backward(*this);
    }
    for (const Node& n : nodes_) {
      if (n.param != nullptr && n.grad.size() != 0) n.param->grad += n.grad;
    }
  }

  void reset() { nodes_.clear(); }
  size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Mat<S> value;
    Mat<S> grad;  // empty until touched
    bool requires_grad = false;
    Parameter<S>* param = nullptr;
    std::function<void(Tape&)> backward;
  };

  friend struct Var<S>;

  const Mat<S>& val(Var<S> v) const { return nodes_[v.id].value; }
  bool track(Var<S> v) const { return nodes_[v.id].requires_grad; }

  Mat<S>& grad_ref(Var<S> v) {
    Node& n = nodes_[v.id];
    if (n.grad.size() == 0)
      n.grad = Mat<S>::Zero(n.value.rows(), n.value.cols());
    return n.grad;
  }

  Var<S> push(Mat<S> v, bool requires_grad, Parameter<S>* p) {
    Node n;
    n.value = std::move(v);
    n.requires_grad = requires_grad;
    n.param = p;
    nodes_.push_back(std::move(n));
    return Var<S>{this, static_cast<int>(nodes_.size()) - 1};
  }

  void record(Var<S> out, std::function<void(Tape&)> fn) {
    if (nodes_[out.id].requires_grad)
      nodes_[out.id].backward = std::move(fn);
  }

  std::vector<Node> nodes_;
};

template <typename S>
const Mat<S>& Var<S>::val() const {
  return tape->value(*this);
}

}  // namespace vcaug
