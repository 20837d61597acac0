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

#include <complex>
#include <vector>

#include "vcaug/common.hpp"

namespace vcaug {

struct StftConfig {
  int n_fft = 1024;
  int hop = 160;
  int win = 640;  // Hann window length, zero-padded to n_fft
};

using SpectrogramC = Eigen::Matrix<std::complex<float>, Eigen::Dynamic,
                                   Eigen::Dynamic>;  // [T x n_fft/2+1]

// Center-padded (reflect) STFT; frame count = 1 + floor(len / hop).
SpectrogramC stft(const std::vector<float>& x, const StftConfig& cfg);

// Overlap-add inverse with squared-window normalization; returns out_len
// samples aligned with the input of stft().
std::vector<float> istft(const SpectrogramC& spec, const StftConfig& cfg,
                         int out_len);

}  // namespace vcaug
