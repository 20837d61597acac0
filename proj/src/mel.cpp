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

#include "vcaug/mel.hpp"

#include <cmath>

namespace vcaug {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::vector<double> mel_center_frequencies_hz(const MelConfig& cfg) {
  const double mel_lo = hz_to_mel(cfg.fmin);
  const double mel_hi = hz_to_mel(cfg.fmax);
  std::vector<double> centers(cfg.n_mels);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double mel = mel_lo + (mel_hi - mel_lo) * (m + 1) / (cfg.n_mels + 1);
    centers[m] = mel_to_hz(mel);
  }
  return centers;
}

MatF mel_filterbank(const MelConfig& cfg) {
  const int n_bins = cfg.n_fft / 2 + 1;
  const double mel_lo = hz_to_mel(cfg.fmin);
  const double mel_hi = hz_to_mel(cfg.fmax);

  std::vector<double> mel_pts(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i)
    mel_pts[i] = mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1);

  MatF fb = MatF::Zero(n_bins, cfg.n_mels);
  for (int k = 0; k < n_bins; ++k) {
    const double freq =
        static_cast<double>(k) * cfg.sample_rate / cfg.n_fft;
    const double mel = hz_to_mel(freq);
    for (int m = 0; m < cfg.n_mels; ++m) {
      const double lo = mel_pts[m];
      const double c = mel_pts[m + 1];
      const double hi = mel_pts[m + 2];
      double v = 0.0;
      if (mel >= lo && mel <= c && c > lo) {
        v = (mel - lo) / (c - lo);
      } else if (mel > c && mel <= hi && hi > c) {
        v = (hi - mel) / (hi - c);
      }
      fb(k, m) = static_cast<float>(v);
    }
  }
  return fb;
}

MelSpectrogram melspec(const Waveform& w, const MelConfig& cfg) {
  require(w.sample_rate == cfg.sample_rate,
          "melspec: waveform rate differs from configured rate");
  require(!w.samples.empty(), "melspec: empty waveform");

  const SpectrogramC spec = stft(w.samples, cfg.stft());
  const MatF fb = mel_filterbank(cfg);

  MatF power = spec.cwiseAbs2();              // [T x n_bins]
  MatF mel = power * fb;                      // [T x n_mels]
  MelSpectrogram out;
  // Clamp after the log too: the floor must be exactly log(log_floor).
  const float log_floor_value = std::log(cfg.log_floor);
  out.frames = mel.cwiseMax(cfg.log_floor)
                   .array()
                   .log()
                   .max(log_floor_value)
                   .matrix();
  out.hop_s = static_cast<double>(cfg.hop) / cfg.sample_rate;
  out.n_mels = cfg.n_mels;
  out.sample_rate = cfg.sample_rate;
  require(out.n_frames() >= 1 && all_finite(out.frames),
          "melspec: produced invalid spectrogram");
  return out;
}

}  // namespace vcaug
