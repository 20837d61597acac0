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

#include "vcaug/features.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace vcaug {

namespace {

constexpr int kContext = 2;  // +-2 frames stacked
constexpr uint64_t kProjectionSeed = 0x5eed5eedULL;

MatF standin_projection(int n_mels) {
  const int in = (2 * kContext + 1) * n_mels;
  Rng rng(kProjectionSeed);
  std::normal_distribution<double> d(0.0, 1.0);
  MatD g(kFeatureDim, in);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = d(rng);
  // Orthonormal columns of Q give orthonormal rows of the projection,
  // so feature norms track mel norms.
  Eigen::HouseholderQR<MatD> qr(g);
  MatD q = qr.householderQ() * MatD::Identity(kFeatureDim, in);
  return q.transpose().cast<float>();  // [in x 512]
}

}  // namespace

FeatureSequence encode(const Waveform& w, SpeechEncoderBackend& backend) {
  require(w.sample_rate == kCanonicalRate,
          "encode: waveform must be at the canonical 16 kHz rate");
  require(w.duration_s() >= kMinEncodeDurationS,
          "encode: input shorter than 25 ms");
  FeatureSequence f;
  try {
    f = backend.encode_raw(w);
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw BackendError("speech encoder backend '" + backend.name() +
                       "' failed: " + e.what());
  }
  if (f.dim() != backend.feature_dim())
    throw BackendError("backend '" + backend.name() +
                       "' produced wrong feature width");
  const long expect = static_cast<long>(w.duration_s() *
                                        backend.frame_rate_hz());
  if (std::abs(static_cast<long>(f.n_frames()) - expect) > 1)
    throw BackendError("backend '" + backend.name() +
                       "' violated its declared frame rate");
  require(all_finite(f.vectors), "encode: non-finite features");
  f.frame_hop_s = 1.0 / backend.frame_rate_hz();
  return f;
}

StandinSpeechEncoder::StandinSpeechEncoder() : StandinSpeechEncoder(MelConfig{}) {}

StandinSpeechEncoder::StandinSpeechEncoder(const MelConfig& mel)
    : mel_(mel), projection_(standin_projection(mel.n_mels)) {}

double StandinSpeechEncoder::frame_rate_hz() const {
  return static_cast<double>(mel_.sample_rate) / mel_.hop;
}

FeatureSequence StandinSpeechEncoder::encode_raw(const Waveform& w) {
  const MelSpectrogram m = melspec(w, mel_);
  const int T = m.n_frames();
  const int n = mel_.n_mels;
  MatF stacked(T, (2 * kContext + 1) * n);
  for (int t = 0; t < T; ++t) {
    for (int c = -kContext; c <= kContext; ++c) {
      const int src = std::clamp(t + c, 0, T - 1);
      stacked.block(t, (c + kContext) * n, 1, n) = m.frames.row(src);
    }
  }
  FeatureSequence f;
  f.vectors = stacked * projection_;
  f.frame_hop_s = static_cast<double>(mel_.hop) / mel_.sample_rate;
  return f;
}

ProcessSpeechEncoder::ProcessSpeechEncoder(std::string command,
                                           std::string checkpoint,
                                           double declared_frame_rate_hz,
                                           int declared_dim, int layer)
    : command_(std::move(command)),
      checkpoint_(std::move(checkpoint)),
      rate_(declared_frame_rate_hz),
      dim_(declared_dim),
      layer_(layer) {
  if (command_.empty())
    throw ConfigError("external feature backend needs features.command");
  if (rate_ <= 0)
    throw ConfigError("external feature backend needs a positive frame rate");
}

FeatureSequence ProcessSpeechEncoder::encode_raw(const Waveform& w) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path();
  const std::string tag =
      "vcaug_feat_" + std::to_string(::getpid()) + "_" +
      std::to_string(reinterpret_cast<uintptr_t>(this));
  const fs::path wav = dir / (tag + ".wav");
  const fs::path bin = dir / (tag + ".bin");
  save_audio(w, wav.string());

  std::string cmd = command_ + " '" + checkpoint_ + "' '" + wav.string() +
                    "' '" + bin.string() + "'";
  if (layer_ >= 0) cmd += " " + std::to_string(layer_);
  const int rc = std::system(cmd.c_str());
  std::error_code ec;
  fs::remove(wav, ec);
  if (rc != 0) {
    fs::remove(bin, ec);
    throw BackendError("external feature command exited with status " +
                       std::to_string(rc));
  }

  std::ifstream in(bin.string(), std::ios::binary);
  if (!in) throw BackendError("external feature command wrote no output");
  uint32_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), 4);
  in.read(reinterpret_cast<char*>(&cols), 4);
  FeatureSequence f;
  f.vectors.resize(rows, cols);
  std::vector<float> buf(static_cast<size_t>(rows) * cols);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * 4));
  if (!in) {
    fs::remove(bin, ec);
    throw BackendError("external feature output truncated");
  }
  for (uint32_t r = 0; r < rows; ++r)
    for (uint32_t c = 0; c < cols; ++c)
      f.vectors(r, c) = buf[static_cast<size_t>(r) * cols + c];
  fs::remove(bin, ec);
  f.frame_hop_s = 1.0 / rate_;
  return f;
}

}  // namespace vcaug
