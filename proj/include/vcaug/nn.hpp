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

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "vcaug/autodiff.hpp"
#include "vcaug/common.hpp"

namespace vcaug {

// Non-owning list of trainable parameters, in registration order.
template <typename S>
class ParamRegistry {
 public:
  void add(Parameter<S>* p) { params_.push_back(p); }
  const std::vector<Parameter<S>*>& all() const { return params_; }

  Eigen::Index total_size() const {
    Eigen::Index n = 0;
    for (auto* p : params_) n += p->size();
    return n;
  }

  void zero_grad() {
    for (auto* p : params_) p->zero_grad();
  }

  S grad_norm() const {
    S acc = 0;
    for (auto* p : params_) acc += p->grad.squaredNorm();
    return std::sqrt(acc);
  }

  // Scales gradients so the global norm is at most max_norm.
  void clip_grad_norm(S max_norm) {
    const S n = grad_norm();
    if (n > max_norm && n > S(0)) {
      const S k = max_norm / n;
      for (auto* p : params_) p->grad *= k;
    }
  }

  Parameter<S>* find(const std::string& name) const {
    for (auto* p : params_)
      if (p->name == name) return p;
    return nullptr;
  }

 private:
  std::vector<Parameter<S>*> params_;
};

// ----- initializers (seeded, deterministic) -----

template <typename S>
void init_uniform(Parameter<S>& p, S bound, Rng& rng) {
  std::uniform_real_distribution<double> d(-static_cast<double>(bound),
                                           static_cast<double>(bound));
  for (Eigen::Index i = 0; i < p.value.size(); ++i)
    p.value.data()[i] = static_cast<S>(d(rng));
}

template <typename S>
void init_xavier(Parameter<S>& p, Eigen::Index fan_in, Eigen::Index fan_out,
                 Rng& rng) {
  const S bound =
      static_cast<S>(std::sqrt(6.0 / static_cast<double>(fan_in + fan_out)));
  init_uniform(p, bound, rng);
}

template <typename S>
void init_gaussian(Parameter<S>& p, S std_dev, Rng& rng) {
  std::normal_distribution<double> d(0.0, static_cast<double>(std_dev));
  for (Eigen::Index i = 0; i < p.value.size(); ++i)
    p.value.data()[i] = static_cast<S>(d(rng));
}

// ----- layers -----

template <typename S>
struct Linear {
  Parameter<S> w;  // [in x out]
  Parameter<S> b;  // [1 x out]

  void init(Eigen::Index in, Eigen::Index out, Rng& rng,
            const std::string& prefix) {
    w.init_zero(in, out, prefix + ".w");
    b.init_zero(1, out, prefix + ".b");
    init_xavier(w, in, out, rng);
  }

  Var<S> forward(Tape<S>& t, Var<S> x) const {
    return t.add_row(t.matmul(x, t.param(const_cast<Parameter<S>&>(w))),
                     t.param(const_cast<Parameter<S>&>(b)));
  }

  void collect(ParamRegistry<S>& r) {
    r.add(&w);
    r.add(&b);
  }
};

// Single LSTM cell; gate order i, f, g, o. Forget-gate bias starts at 1.
template <typename S>
struct LstmCell {
  Parameter<S> w_x;  // [in x 4H]
  Parameter<S> w_h;  // [H x 4H]
  Parameter<S> b;    // [1 x 4H]
  Eigen::Index hidden = 0;

  struct State {
    Var<S> h;
    Var<S> c;
  };

  void init(Eigen::Index in, Eigen::Index h, Rng& rng,
            const std::string& prefix) {
    hidden = h;
    w_x.init_zero(in, 4 * h, prefix + ".w_x");
    w_h.init_zero(h, 4 * h, prefix + ".w_h");
    b.init_zero(1, 4 * h, prefix + ".b");
    init_xavier(w_x, in, 4 * h, rng);
    init_xavier(w_h, h, 4 * h, rng);
    b.value.block(0, h, 1, h).setConstant(S(1));  // forget gate
  }

  State initial(Tape<S>& t) const {
    return State{t.constant(Mat<S>::Zero(1, hidden)),
                 t.constant(Mat<S>::Zero(1, hidden))};
  }

  State step(Tape<S>& t, Var<S> x, const State& s) const {
    auto& self = const_cast<LstmCell&>(*this);
    Var<S> gates = t.add_row(
        t.add(t.matmul(x, t.param(self.w_x)), t.matmul(s.h, t.param(self.w_h))),
        t.param(self.b));
    Var<S> i = t.sigmoid(t.slice_cols(gates, 0, hidden));
    Var<S> f = t.sigmoid(t.slice_cols(gates, hidden, hidden));
    Var<S> g = t.tanh_(t.slice_cols(gates, 2 * hidden, hidden));
    Var<S> o = t.sigmoid(t.slice_cols(gates, 3 * hidden, hidden));
    Var<S> c = t.add(t.mul(f, s.c), t.mul(i, g));
    Var<S> h = t.mul(o, t.tanh_(c));
    return State{h, c};
  }

  void collect(ParamRegistry<S>& r) {
    r.add(&w_x);
    r.add(&w_h);
    r.add(&b);
  }
};

// Runs an LSTM over the rows of x [T x in]; returns all hidden states
// [T x H] and the final state.
template <typename S>
struct LstmOut {
  Var<S> states;
  typename LstmCell<S>::State final_state;
};

template <typename S>
LstmOut<S> lstm_run(Tape<S>& t, const LstmCell<S>& cell, Var<S> x) {
  const Eigen::Index T = x.rows();
  typename LstmCell<S>::State s = cell.initial(t);
  std::vector<Var<S>> hs;
  hs.reserve(T);
  for (Eigen::Index i = 0; i < T; ++i) {
    s = cell.step(t, t.row(x, i), s);
    hs.push_back(s.h);
  }
  return LstmOut<S>{t.concat_rows(hs), s};
}

enum class ConvAct { kRelu, kTanh, kNone };

// Conv1d ('same' centering) + optional layer norm + activation, shared by
// the reference/content encoders (relu) and the decoder post-net (tanh).
template <typename S>
struct ConvBlock {
  Parameter<S> w;     // [k*Cin x Cout]
  Parameter<S> b;     // [1 x Cout]
  Parameter<S> gain;  // [1 x Cout]
  Parameter<S> bias;  // [1 x Cout]
  int kernel = 9;
  int stride = 1;
  ConvAct act = ConvAct::kRelu;
  bool use_norm = true;
  Eigen::Index in_ch = 0, out_ch = 0;

  void init(Eigen::Index cin, Eigen::Index cout, int k, int s, Rng& rng,
            const std::string& prefix, ConvAct a = ConvAct::kRelu,
            bool norm = true) {
    kernel = k;
    stride = s;
    in_ch = cin;
    out_ch = cout;
    act = a;
    use_norm = norm;
    w.init_zero(k * cin, cout, prefix + ".w");
    b.init_zero(1, cout, prefix + ".b");
    gain.init_zero(1, cout, prefix + ".gain");
    bias.init_zero(1, cout, prefix + ".bias");
    init_xavier(w, k * cin, cout, rng);
    gain.value.setConstant(S(1));
  }

  Var<S> forward(Tape<S>& t, Var<S> x) const {
    auto& self = const_cast<ConvBlock&>(*this);
    Var<S> y = t.conv1d(x, t.param(self.w), t.param(self.b), kernel, stride);
    if (use_norm)
      y = t.layer_norm(y, t.param(self.gain), t.param(self.bias));
    switch (act) {
      case ConvAct::kRelu: return t.relu(y);
      case ConvAct::kTanh: return t.tanh_(y);
      case ConvAct::kNone: return y;
    }
    return y;
  }

  void collect(ParamRegistry<S>& r) {
    r.add(&w);
    r.add(&b);
    if (use_norm) {
      r.add(&gain);
      r.add(&bias);
    }
  }
};

}  // namespace vcaug
