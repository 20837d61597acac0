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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gradcheck.hpp"
#include "vcaug/autodiff.hpp"
#include "vcaug/nn.hpp"

using namespace vcaug;
using namespace vcaug::test;

namespace {

Mat<double> randm(Eigen::Index r, Eigen::Index c, Rng& rng, double s = 1.0) {
  std::normal_distribution<double> d(0.0, s);
  Mat<double> m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
  return m;
}

// Checks d(mean(R .* f(params)))/dparams against finite differences.
void check_op(
    const std::function<Var<double>(Tape<double>&,
                                    std::vector<Parameter<double>*>&)>& f,
    std::vector<Parameter<double>*> params, Rng& rng) {
  ParamRegistry<double> reg;
  for (auto* p : params) reg.add(p);

  Mat<double> weight;
  auto forward = [&]() {
    Tape<double> t;
    Var<double> y = f(t, params);
    if (weight.size() == 0) weight = randm(y.rows(), y.cols(), rng);
    Var<double> loss = t.mean_all(t.mul(y, t.constant(weight)));
    return t.value(loss)(0, 0);
  };
  auto backward = [&]() {
    Tape<double> t;
    Var<double> y = f(t, params);
    if (weight.size() == 0) weight = randm(y.rows(), y.cols(), rng);
    Var<double> loss = t.mean_all(t.mul(y, t.constant(weight)));
    t.backward(loss);
  };
  CHECK(fd_max_rel_err(reg, forward, backward) < 1e-5);
}

Parameter<double> make_param(Eigen::Index r, Eigen::Index c, Rng& rng,
                             const std::string& name, double s = 1.0) {
  Parameter<double> p;
  p.init_zero(r, c, name);
  p.value = randm(r, c, rng, s);
  return p;
}

}  // namespace

TEST_CASE("elementwise and structural op gradients") {
  Rng rng(7);
  Parameter<double> a = make_param(3, 4, rng, "a");
  Parameter<double> b = make_param(3, 4, rng, "b");

  check_op(
      [](Tape<double>& t, std::vector<Parameter<double>*>& p) {
        return t.add(t.param(*p[0]), t.param(*p[1]));
      },
      {&a, &b}, rng);
  check_op(
      [](Tape<double>& t, std::vector<Parameter<double>*>& p) {
        return t.sub(t.param(*p[0]), t.param(*p[1]));
      },
      {&a, &b}, rng);
  check_op(
      [](Tape<double>& t, std::vector<Parameter<double>*>& p) {
        return t.mul(t.param(*p[0]), t.param(*p[1]));
      },
      {&a, &b}, rng);
  check_op(
      [](Tape<double>& t, std::vector<Parameter<double>*>& p) {
        return t.scale(t.param(*p[0]), 2.5);
      },
      {&a}, rng);
  check_op(
      [](Tape<double>& t, std::vector<Parameter<double>*>& p) {
        return t.transpose(t.param(*p[0]));
      },
      {&a}, rng);
  check_op(
      [](Tape<double>& t, std::vector<Parameter<double>*>& p) {
        return t.concat_cols(t.param(*p[0]), t.param(*p[1]));
      },
      {&a, &b}, rng);
  check_op(
      [](Tape<double>& t, std::vector<Parameter<double>*>& p) {
        return t.slice_cols(t.param(*p[0]), 1, 2);
      },
      {&a}, rng);
  check_op(
      [](Tape<double>& t, std::vector<Parameter<double>*>& p) {
        return t.slice_rows(t.param(*p[0]), 1, 2);
      },
      {&a}, rng);
}

TEST_CASE("matmul / broadcast / activations") {
  Rng rng(11);
  Parameter<double> a = make_param(3, 5, rng, "a");
  Parameter<double> b = make_param(5, 2, rng, "b");
  Parameter<double> r = make_param(1, 5, rng, "r");

  check_op(
      [](Tape<double>& t, std::vector<Parameter<double>*>& p) {
        return t.matmul(t.param(*p[0]), t.param(*p[1]));
      },
      {&a, &b}, rng);
  check_op(
      [](Tape<double>& t, std::vector<Parameter<double>*>& p) {
        return t.add_row(t.param(*p[0]), t.param(*p[1]));
      },
      {&a, &r}, rng);
  check_op(
      [](Tape<double>& t, std::vector<Parameter<double>*>& p) {
        return t.tanh_(t.param(*p[0]));
      },
      {&a}, rng);
  check_op(
      [](Tape<double>& t, std::vector<Parameter<double>*>& p) {
        return t.sigmoid(t.param(*p[0]));
      },
      {&a}, rng);
  check_op(
      [](Tape<double>& t, std::vector<Parameter<double>*>& p) {
        return t.relu(t.param(*p[0]));
      },
      {&a}, rng);
  check_op(
      [](Tape<double>& t, std::vector<Parameter<double>*>& p) {
        return t.softmax_rows(t.param(*p[0]));
      },
      {&a}, rng);
}

TEST_CASE("scalar losses") {
  Rng rng(13);
  Parameter<double> a = make_param(4, 3, rng, "a");
  Mat<double> target = randm(4, 3, rng);

  ParamRegistry<double> reg;
  reg.add(&a);
  auto fwd = [&]() {
    Tape<double> t;
    Var<double> loss = t.mse(t.param(a), target);
    return t.value(loss)(0, 0);
  };
  auto bwd = [&]() {
    Tape<double> t;
    Var<double> loss = t.mse(t.param(a), target);
    t.backward(loss);
  };
  CHECK(fd_max_rel_err(reg, fwd, bwd) < 1e-6);

  Parameter<double> z = make_param(6, 1, rng, "z");
  Vec<double> y(6);
  y << 0, 0, 1, 0, 1, 0;
  ParamRegistry<double> reg2;
  reg2.add(&z);
  auto fwd2 = [&]() {
    Tape<double> t;
    Var<double> loss = t.bce_logits(t.param(z), y, 5.0);
    return t.value(loss)(0, 0);
  };
  auto bwd2 = [&]() {
    Tape<double> t;
    Var<double> loss = t.bce_logits(t.param(z), y, 5.0);
    t.backward(loss);
  };
  CHECK(fd_max_rel_err(reg2, fwd2, bwd2) < 1e-6);
}

TEST_CASE("conv1d gradients, stride 1 and 2") {
  Rng rng(17);
  for (int stride : {1, 2}) {
    Parameter<double> x = make_param(11, 3, rng, "x");
    Parameter<double> w = make_param(5 * 3, 4, rng, "w", 0.4);
    Parameter<double> b = make_param(1, 4, rng, "b");
    check_op(
        [stride](Tape<double>& t, std::vector<Parameter<double>*>& p) {
          return t.conv1d(t.param(*p[0]), t.param(*p[1]), t.param(*p[2]), 5,
                          stride);
        },
        {&x, &w, &b}, rng);
  }
}

TEST_CASE("layer_norm gradients") {
  Rng rng(19);
  Parameter<double> x = make_param(5, 7, rng, "x");
  Parameter<double> g = make_param(1, 7, rng, "g");
  Parameter<double> b = make_param(1, 7, rng, "b");
  check_op(
      [](Tape<double>& t, std::vector<Parameter<double>*>& p) {
        return t.layer_norm(t.param(*p[0]), t.param(*p[1]), t.param(*p[2]));
      },
      {&x, &g, &b}, rng);
}

TEST_CASE("lstm cell and run gradients") {
  Rng rng(23);
  LstmCell<double> cell;
  cell.init(4, 3, rng, "lstm");
  Parameter<double> x = make_param(6, 4, rng, "x", 0.8);

  ParamRegistry<double> reg;
  cell.collect(reg);
  reg.add(&x);

  Mat<double> weight = randm(6, 3, rng);
  auto fwd = [&]() {
    Tape<double> t;
    LstmOut<double> out = lstm_run(t, cell, t.param(x));
    Var<double> loss = t.mean_all(t.mul(out.states, t.constant(weight)));
    return t.value(loss)(0, 0);
  };
  auto bwd = [&]() {
    Tape<double> t;
    LstmOut<double> out = lstm_run(t, cell, t.param(x));
    Var<double> loss = t.mean_all(t.mul(out.states, t.constant(weight)));
    t.backward(loss);
  };
  CHECK(fd_max_rel_err(reg, fwd, bwd) < 1e-5);
}

TEST_CASE("conv block gradients") {
  Rng rng(29);
  ConvBlock<double> blk;
  blk.init(3, 4, 5, 2, rng, "blk");
  Parameter<double> x = make_param(9, 3, rng, "x");

  ParamRegistry<double> reg;
  blk.collect(reg);
  reg.add(&x);

  Mat<double> weight;
  auto build = [&](Tape<double>& t) {
    Var<double> y = blk.forward(t, t.param(x));
    if (weight.size() == 0) weight = randm(y.rows(), y.cols(), rng);
    return t.mean_all(t.mul(y, t.constant(weight)));
  };
  auto fwd = [&]() {
    Tape<double> t;
    return t.value(build(t))(0, 0);
  };
  auto bwd = [&]() {
    Tape<double> t;
    t.backward(build(t));
  };
  CHECK(fd_max_rel_err(reg, fwd, bwd) < 1e-5);
}

TEST_CASE("parameter gradients accumulate across uses") {
  Rng rng(31);
  Parameter<double> a = make_param(2, 2, rng, "a");
  Tape<double> t;
  Var<double> x = t.param(a);
  Var<double> y = t.param(a);  // same parameter used twice
  Var<double> loss = t.sum_all(t.add(x, y));
  a.zero_grad();
  t.backward(loss);
  CHECK(a.grad.isApprox(Mat<double>::Constant(2, 2, 2.0)));
}

TEST_CASE("values are what they should be") {
  Tape<double> t;
  Mat<double> m(2, 2);
  m << 1, 2, 3, 4;
  Var<double> a = t.constant(m);
  CHECK(t.value(t.sum_all(a))(0, 0) == 10.0);
  CHECK(t.value(t.mean_all(a))(0, 0) == 2.5);
  Var<double> sm = t.softmax_rows(a);
  CHECK(t.value(sm).row(0).sum() == doctest::Approx(1.0));
  CHECK(t.value(sm)(0, 1) > t.value(sm)(0, 0));
}
