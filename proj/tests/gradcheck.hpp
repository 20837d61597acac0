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

#include <algorithm>
#include <functional>

#include "vcaug/nn.hpp"

namespace vcaug::test {

// Central finite differences (step h) against analytic gradients for every
// parameter in the registry. forward() must rebuild the graph from the
// current parameter values and return the scalar loss; backward_pass()
// must populate parameter gradients. Returns the max relative error.
inline double fd_max_rel_err(
    ParamRegistry<double>& reg,
    const std::function<double()>& forward,
    const std::function<void()>& backward_pass, double h = 1e-5,
    Eigen::Index max_elems_per_param = 1 << 30) {
  reg.zero_grad();
  backward_pass();

  double worst = 0.0;
  for (Parameter<double>* p : reg.all()) {
    const Eigen::Index n = std::min<Eigen::Index>(p->size(),
                                                  max_elems_per_param);
    for (Eigen::Index i = 0; i < n; ++i) {
      double* x = p->value.data() + i;
      const double orig = *x;
      *x = orig + h;
      const double lp = forward();
      *x = orig - h;
      const double lm = forward();
      *x = orig;
      const double fd = (lp - lm) / (2.0 * h);
      const double an = p->grad.data()[i];
      const double denom = std::max({std::abs(an), std::abs(fd), 1e-7});
      worst = std::max(worst, std::abs(an - fd) / denom);
    }
  }
  return worst;
}

}  // namespace vcaug::test
