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

#include "vcaug/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace vcaug {

namespace {

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open audio file: " + path);
  in.seekg(0, std::ios::end);
  std::streamoff n = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<uint8_t> buf(static_cast<size_t>(std::max<std::streamoff>(n, 0)));
  if (!buf.empty()) in.read(reinterpret_cast<char*>(buf.data()), n);
  if (!in) throw IoError("failed to read audio file: " + path);
  return buf;
}

uint32_t le32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t le16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

Waveform average_to_mono(const std::vector<float>& interleaved, int channels,
                         int rate) {
  Waveform w;
  w.sample_rate = rate;
  if (channels <= 1) {
    w.samples = interleaved;
    return w;
  }
  size_t frames = interleaved.size() / channels;
  w.samples.resize(frames);
  for (size_t i = 0; i < frames; ++i) {
    float acc = 0.0f;
    for (int c = 0; c < channels; ++c) acc += interleaved[i * channels + c];
    w.samples[i] = acc / channels;
  }
  return w;
}

}  // namespace

Waveform load_wav(const std::string& path) {
  std::vector<uint8_t> buf = read_file(path);
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw IoError("not a RIFF/WAVE file: " + path);
  }
  size_t pos = 12;
  int channels = 0;
  int rate = 0;
  int bits = 0;
  int format = 0;
  const uint8_t* data = nullptr;
  size_t data_len = 0;
  while (pos + 8 <= buf.size()) {
    const uint8_t* hdr = buf.data() + pos;
    uint32_t sz = le32(hdr + 4);
    const uint8_t* body = hdr + 8;
    size_t avail = buf.size() - pos - 8;
    size_t body_len = std::min<size_t>(sz, avail);
    if (std::memcmp(hdr, "fmt ", 4) == 0 && body_len >= 16) {
      format = le16(body);
      channels = le16(body + 2);
      rate = static_cast<int>(le32(body + 4));
      bits = le16(body + 14);
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = body;
      data_len = body_len;
    }
    pos += 8 + sz + (sz & 1);  // chunks are word-aligned
  }
  if (format == 0 || data == nullptr)
    throw IoError("WAV missing fmt/data chunk: " + path);
  if (channels < 1 || rate <= 0)
    throw IoError("WAV has invalid fmt chunk: " + path);

  std::vector<float> interleaved;
  if (format == 1 && bits == 16) {
    size_t n = data_len / 2;
    interleaved.resize(n);
    for (size_t i = 0; i < n; ++i) {
      int16_t v = static_cast<int16_t>(le16(data + 2 * i));
      interleaved[i] = static_cast<float>(v) / 32768.0f;
    }
  } else if (format == 3 && bits == 32) {
    size_t n = data_len / 4;
    interleaved.resize(n);
    for (size_t i = 0; i < n; ++i) {
      uint32_t u = le32(data + 4 * i);
      float f;
      std::memcpy(&f, &u, 4);
      interleaved[i] = f;
    }
  } else {
    throw IoError("unsupported WAV encoding (want PCM16 or float32): " + path);
  }
  return average_to_mono(interleaved, channels, rate);
}

void save_audio(const Waveform& w, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  uint32_t n = static_cast<uint32_t>(w.samples.size());
  uint32_t data_bytes = n * 2;
  uint32_t riff_len = 36 + data_bytes;
  int rate = w.sample_rate;
  uint32_t byte_rate = static_cast<uint32_t>(rate) * 2;

  auto w32 = [&](uint32_t v) {
    uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                    static_cast<uint8_t>(v >> 16),
                    static_cast<uint8_t>(v >> 24)};
    out.write(reinterpret_cast<char*>(b), 4);
  };
  auto w16 = [&](uint16_t v) {
    uint8_t b[2] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8)};
    out.write(reinterpret_cast<char*>(b), 2);
  };

  out.write("RIFF", 4);
  w32(riff_len);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  w32(16);
  w16(1);  // PCM
  w16(1);  // mono
  w32(static_cast<uint32_t>(rate));
  w32(byte_rate);
  w16(2);   // block align
  w16(16);  // bits
  out.write("data", 4);
  w32(data_bytes);
  for (uint32_t i = 0; i < n; ++i) {
    float v = std::clamp(w.samples[i], -1.0f, 1.0f);
    int16_t q = static_cast<int16_t>(std::lround(v * 32767.0f));
    w16(static_cast<uint16_t>(q));
  }
  if (!out) throw IoError("failed writing WAV: " + path);
}

Waveform resample(const Waveform& w, int target_rate) {
  require(target_rate > 0, "resample: target rate must be positive");
  require(w.sample_rate > 0, "resample: source rate must be positive");
  if (w.sample_rate == target_rate) return w;

  const double ratio =
      static_cast<double>(target_rate) / static_cast<double>(w.sample_rate);
  const int64_t in_len = static_cast<int64_t>(w.samples.size());
  const int64_t out_len = std::llround(static_cast<double>(in_len) * ratio);
  Waveform out;
  out.sample_rate = target_rate;
  out.samples.resize(static_cast<size_t>(std::max<int64_t>(out_len, 0)));
  if (in_len == 0 || out_len <= 0) return out;

  // Kernel: cutoff-scaled sinc under a Hann window, widened when
  // downsampling so the lowpass lands at the target Nyquist.
  const double cutoff = std::min(1.0, ratio);
  const int taps = 32;
  const double half_width = taps / cutoff;

  for (int64_t i = 0; i < out_len; ++i) {
    const double t = static_cast<double>(i) / ratio;  // position in input
    const int64_t n0 = static_cast<int64_t>(std::ceil(t - half_width));
    const int64_t n1 = static_cast<int64_t>(std::floor(t + half_width));
    double acc = 0.0;
    for (int64_t n = std::max<int64_t>(n0, 0);
         n <= std::min<int64_t>(n1, in_len - 1); ++n) {
      const double d = t - static_cast<double>(n);
      double k;
      if (std::abs(d) < 1e-12) {
        k = cutoff;
      } else {
        const double x = M_PI * cutoff * d;
        k = cutoff * std::sin(x) / x;
      }
      const double win = 0.5 * (1.0 + std::cos(M_PI * d / half_width));
      acc += static_cast<double>(w.samples[static_cast<size_t>(n)]) * k * win;
    }
    out.samples[static_cast<size_t>(i)] = static_cast<float>(acc);
  }
  return out;
}

Waveform load_audio(const std::string& path, int target_rate) {
  require(target_rate > 0, "load_audio: target rate must be positive");
  std::vector<uint8_t> head = read_file(path);
  Waveform w;
  if (head.size() >= 4 && std::memcmp(head.data(), "fLaC", 4) == 0) {
    w = load_flac(path);
  } else {
    w = load_wav(path);
  }
  if (w.samples.empty())
    throw ValidationError("zero-length audio: " + path);
  w = resample(w, target_rate);
  return w;
}

}  // namespace vcaug
