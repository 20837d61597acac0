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

#include <string>
#include <vector>

#include "vcaug/common.hpp"

namespace vcaug {

inline constexpr int kCanonicalRate = 16000;

// Mono audio buffer. Multichannel inputs are averaged to mono at load.
struct Waveform {
  std::vector<float> samples;
  int sample_rate = kCanonicalRate;

  double duration_s() const {
    return sample_rate > 0
               ? static_cast<double>(samples.size()) / sample_rate
               : 0.0;
  }
};

// Decodes WAV (PCM16 / float32) or FLAC, averages channels to mono, and
// resamples to target_rate. Zero-length audio is a ValidationError,
// unreadable/undecodable files an IoError.
Waveform load_audio(const std::string& path, int target_rate);

// Format-specific loaders; keep the file's native sample rate.
Waveform load_wav(const std::string& path);
Waveform load_flac(const std::string& path);

// Writes mono WAV PCM16 (samples clipped to [-1, 1]).
void save_audio(const Waveform& w, const std::string& path);

// Windowed-sinc resampler. Identity when rates match.
// Output length = round(n * target_rate / sample_rate).
Waveform resample(const Waveform& w, int target_rate);

}  // namespace vcaug
