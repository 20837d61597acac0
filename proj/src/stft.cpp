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

#include "vcaug/stft.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>

namespace vcaug {

namespace {

std::vector<float> hann_window(int n) {
  std::vector<float> w(n);
  for (int i = 0; i < n; ++i)
    w[i] = 0.5f - 0.5f * std::cos(2.0 * M_PI * i / n);
  return w;
}

// Reflect index into [0, n); bounces until in range so very short inputs
// still pad cleanly.
int reflect_index(long long i, long long n) {
  if (n == 1) return 0;
  const long long period = 2 * (n - 1);
  long long m = i % period;
  if (m < 0) m += period;
  if (m >= n) m = period - m;
  return static_cast<int>(m);
}

}  // namespace

SpectrogramC stft(const std::vector<float>& x, const StftConfig& cfg) {
  require(!x.empty(), "stft: empty input");
  require(cfg.win <= cfg.n_fft, "stft: window longer than FFT size");
  const int n_bins = cfg.n_fft / 2 + 1;
  const int n = static_cast<int>(x.size());
  const int n_frames = 1 + n / cfg.hop;
  const int pad = cfg.n_fft / 2;
  const int win_off = (cfg.n_fft - cfg.win) / 2;
  const std::vector<float> win = hann_window(cfg.win);

  Eigen::FFT<float> fft;
  std::vector<float> frame(cfg.n_fft);
  std::vector<std::complex<float>> out(cfg.n_fft);

  SpectrogramC spec(n_frames, n_bins);
  for (int t = 0; t < n_frames; ++t) {
    std::fill(frame.begin(), frame.end(), 0.0f);
    const long long start = static_cast<long long>(t) * cfg.hop - pad;
    for (int j = 0; j < cfg.win; ++j) {
      const long long src = start + win_off + j;
      const float s = x[reflect_index(src, n)];
      frame[win_off + j] = s * win[j];
    }
    fft.fwd(out, frame);
    for (int k = 0; k < n_bins; ++k) spec(t, k) = out[k];
  }
  return spec;
}

std::vector<float> istft(const SpectrogramC& spec, const StftConfig& cfg,
                         int out_len) {
  require(spec.rows() >= 1, "istft: empty spectrogram");
  require(spec.cols() == cfg.n_fft / 2 + 1, "istft: bin count mismatch");
  const int n_frames = static_cast<int>(spec.rows());
  const int pad = cfg.n_fft / 2;
  const int win_off = (cfg.n_fft - cfg.win) / 2;
  const std::vector<float> win = hann_window(cfg.win);

  const long long total =
      static_cast<long long>(n_frames - 1) * cfg.hop + cfg.n_fft;
  std::vector<double> acc(total, 0.0);
  std::vector<double> wsum(total, 0.0);

  Eigen::FFT<float> fft;
  std::vector<std::complex<float>> full(cfg.n_fft);
  std::vector<float> frame(cfg.n_fft);

  for (int t = 0; t < n_frames; ++t) {
    for (int k = 0; k <= cfg.n_fft / 2; ++k) full[k] = spec(t, k);
    for (int k = cfg.n_fft / 2 + 1; k < cfg.n_fft; ++k)
      full[k] = std::conj(spec(t, cfg.n_fft - k));
    fft.inv(frame, full);
    const long long base = static_cast<long long>(t) * cfg.hop;
    for (int j = 0; j < cfg.win; ++j) {
      acc[base + win_off + j] += static_cast<double>(frame[win_off + j]) *
                                 win[j];
      wsum[base + win_off + j] += static_cast<double>(win[j]) * win[j];
    }
  }

  std::vector<float> out(out_len, 0.0f);
  for (int i = 0; i < out_len; ++i) {
    const long long src = static_cast<long long>(i) + pad;
    if (src < total && wsum[src] > 1e-9)
      out[i] = static_cast<float>(acc[src] / wsum[src]);
  }
  return out;
}

}  // namespace vcaug
