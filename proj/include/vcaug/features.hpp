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

#include <memory>
#include <string>

#include "vcaug/audio.hpp"
#include "vcaug/common.hpp"
#include "vcaug/mel.hpp"

namespace vcaug {

inline constexpr int kFeatureDim = 512;
inline constexpr double kFeatureHopS = 0.010;
inline constexpr double kMinEncodeDurationS = 0.025;

// One row per 10 ms frame.
struct FeatureSequence {
  MatF vectors;  // [T x dim]
  double frame_hop_s = kFeatureHopS;
  std::string source_utterance_id;

  int n_frames() const { return static_cast<int>(vectors.rows()); }
  int dim() const { return static_cast<int>(vectors.cols()); }
};

// Frame-level speech encoder slot. Implementations must declare their
// frame rate; encode() validates it against the produced frame count.
class SpeechEncoderBackend {
 public:
  virtual ~SpeechEncoderBackend() = default;
  virtual std::string name() const = 0;
  virtual bool deterministic() const = 0;
  virtual int feature_dim() const = 0;
  virtual double frame_rate_hz() const = 0;
  virtual FeatureSequence encode_raw(const Waveform& w) = 0;
};

// Validated entry point: requires canonical-rate input, duration >= 25 ms;
// checks the backend honours its declared frame rate (T within +-1 of
// floor(duration * rate)).
FeatureSequence encode(const Waveform& w, SpeechEncoderBackend& backend);

// Deterministic desk-scale stand-in: log-mel frames stacked with +-2
// frames of context, lifted to 512-d through a fixed seeded
// orthonormal-row projection. Pure: no per-instance state.
class StandinSpeechEncoder : public SpeechEncoderBackend {
 public:
  StandinSpeechEncoder();
  explicit StandinSpeechEncoder(const MelConfig& mel);

  std::string name() const override { return "standin"; }
  bool deterministic() const override { return true; }
  int feature_dim() const override { return kFeatureDim; }
  double frame_rate_hz() const override;
  FeatureSequence encode_raw(const Waveform& w) override;

 private:
  MelConfig mel_;
  MatF projection_;  // [5*n_mels x 512]
};

// Adapter for an external pretrained encoder: runs
//   <command> <checkpoint> <in.wav> <out.bin>
// per utterance, where out.bin is u32 rows, u32 cols, float32 row-major.
class ProcessSpeechEncoder : public SpeechEncoderBackend {
 public:
  ProcessSpeechEncoder(std::string command, std::string checkpoint,
                       double declared_frame_rate_hz, int declared_dim,
                       int layer = -1);

  std::string name() const override { return "external"; }
  bool deterministic() const override { return false; }
  int feature_dim() const override { return dim_; }
  double frame_rate_hz() const override { return rate_; }
  FeatureSequence encode_raw(const Waveform& w) override;

 private:
  std::string command_;
  std::string checkpoint_;
  double rate_;
  int dim_;
  int layer_;  // which internal layer the external runner should tap
};

}  // namespace vcaug
