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

#include <vector>

#include "vcaug/audio.hpp"
#include "vcaug/common.hpp"
#include "vcaug/stft.hpp"

namespace vcaug {

// 16 kHz / 10 ms hop so mel frames align one-to-one with speech-encoder
// feature frames.
struct MelConfig {
  int sample_rate = kCanonicalRate;
  int hop = 160;
  int win = 640;
  int n_fft = 1024;
  int n_mels = 80;
  double fmin = 0.0;
  double fmax = 8000.0;
  float log_floor = 1e-5f;

  StftConfig stft() const { return StftConfig{n_fft, hop, win}; }
};

// [T x n_mels] natural-log mel power, floored at log(log_floor).
struct MelSpectrogram {
  MatF frames;
  double hop_s = 0.010;
  int n_mels = 80;
  int sample_rate = kCanonicalRate;

  int n_frames() const { return static_cast<int>(frames.rows()); }
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular peak-height-1 filters, centers uniform on the mel scale.
// Shape [n_fft/2+1 x n_mels].
MatF mel_filterbank(const MelConfig& cfg);

// Center frequency (Hz) of each mel filter.
std::vector<double> mel_center_frequencies_hz(const MelConfig& cfg);

// Deterministic: identical Waveform -> bit-identical MelSpectrogram.
MelSpectrogram melspec(const Waveform& w, const MelConfig& cfg);

}  // namespace vcaug
