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

#include <cmath>
#include <fstream>

#include "testutil.hpp"
#include "vcaug/audio.hpp"
#include "vcaug/mel.hpp"
#include "vcaug/stft.hpp"

using namespace vcaug;
using namespace vcaug::test;

namespace {

// Independent oracle: exact band-limited interpolation of x (rate r_in)
// at the output grid of r_out, summing the unwindowed sinc train.
std::vector<float> sinc_interp_oracle(const std::vector<float>& x, int r_in,
                                      int r_out) {
  const double ratio = static_cast<double>(r_out) / r_in;
  const double cutoff = std::min(1.0, ratio);
  const int64_t out_len =
      std::llround(static_cast<double>(x.size()) * ratio);
  std::vector<float> y(static_cast<size_t>(out_len));
  for (int64_t i = 0; i < out_len; ++i) {
    const double t = static_cast<double>(i) / ratio;
    double acc = 0.0;
    for (size_t n = 0; n < x.size(); ++n) {
      const double d = t - static_cast<double>(n);
      double s;
      if (std::abs(d) < 1e-12) {
        s = cutoff;
      } else {
        const double a = M_PI * cutoff * d;
        s = cutoff * std::sin(a) / a;
      }
      acc += x[n] * s;
    }
    y[static_cast<size_t>(i)] = static_cast<float>(acc);
  }
  return y;
}

}  // namespace

TEST_CASE("wav roundtrip pcm16") {
  TempDir td;
  Waveform w = make_sine(440.0, 0.25);
  save_audio(w, td.file("a.wav"));
  Waveform r = load_wav(td.file("a.wav"));
  REQUIRE(r.sample_rate == 16000);
  REQUIRE(r.samples.size() == w.samples.size());
  for (size_t i = 0; i < w.samples.size(); i += 97)
    CHECK(std::abs(r.samples[i] - w.samples[i]) < 2.0f / 32768.0f);
}

TEST_CASE("load_audio identity resample keeps exact length") {
  TempDir td;
  save_audio(make_sine(300.0, 1.0, 16000), td.file("a.wav"));
  Waveform w = load_audio(td.file("a.wav"), 16000);
  CHECK(w.samples.size() == 16000);
  CHECK(w.sample_rate == 16000);
}

TEST_CASE("resample 32k to 16k length and content vs sinc oracle") {
  Waveform src = make_sine(1000.0, 1.0, 32000);
  Waveform out = resample(src, 16000);
  CHECK(std::abs(static_cast<long>(out.samples.size()) - 16000L) <= 1);

  // Compare against brute-force band-limited interpolation on a short cut.
  Waveform cut;
  cut.sample_rate = 32000;
  cut.samples.assign(src.samples.begin(), src.samples.begin() + 3200);
  Waveform got = resample(cut, 16000);
  std::vector<float> want = sinc_interp_oracle(cut.samples, 32000, 16000);
  REQUIRE(got.samples.size() == want.size());
  double err = 0.0, ref = 0.0;
  for (size_t i = 200; i + 200 < want.size(); ++i) {  // skip edge taper
    err += (got.samples[i] - want[i]) * (got.samples[i] - want[i]);
    ref += want[i] * want[i];
  }
  CHECK(std::sqrt(err / ref) < 1e-2);
}

TEST_CASE("zero-length audio is a validation error") {
  TempDir td;
  Waveform empty;
  empty.sample_rate = 16000;
  save_audio(empty, td.file("z.wav"));
  CHECK_THROWS_AS(load_audio(td.file("z.wav"), 16000), ValidationError);
}

TEST_CASE("unreadable file is an io error") {
  CHECK_THROWS_AS(load_audio("/nonexistent/nope.wav", 16000), IoError);
}

TEST_CASE("multichannel wav is averaged to mono") {
  TempDir td;
  // Hand-write a 2-channel PCM16 wav where L = 0.5, R = -0.5.
  std::ofstream f(td.file("st.wav"), std::ios::binary);
  auto w32 = [&](uint32_t v) { f.write(reinterpret_cast<char*>(&v), 4); };
  auto w16 = [&](uint16_t v) { f.write(reinterpret_cast<char*>(&v), 2); };
  const int n = 100;
  f.write("RIFF", 4);
  w32(36 + n * 4);
  f.write("WAVE", 4);
  f.write("fmt ", 4);
  w32(16);
  w16(1);
  w16(2);
  w32(16000);
  w32(16000 * 4);
  w16(4);
  w16(16);
  f.write("data", 4);
  w32(n * 4);
  for (int i = 0; i < n; ++i) {
    w16(static_cast<uint16_t>(16384));
    w16(static_cast<uint16_t>(-16384));
  }
  f.close();
  Waveform w = load_wav(td.file("st.wav"));
  REQUIRE(w.samples.size() == 100);
  for (int i = 0; i < 100; i += 13) CHECK(std::abs(w.samples[i]) < 1e-4f);
}

TEST_CASE("flac verbatim roundtrip is exact") {
  TempDir td;
  std::vector<int16_t> pcm(5000);
  for (size_t i = 0; i < pcm.size(); ++i)
    pcm[i] = static_cast<int16_t>(
        std::lround(12000.0 * std::sin(2.0 * M_PI * 523.0 * i / 16000.0)));
  write_bytes(td.file("a.flac"), encode_flac_mono16(pcm, 16000));
  Waveform w = load_flac(td.file("a.flac"));
  REQUIRE(w.sample_rate == 16000);
  REQUIRE(w.samples.size() == pcm.size());
  for (size_t i = 0; i < pcm.size(); i += 37)
    CHECK(w.samples[i] == doctest::Approx(pcm[i] / 32768.0f).epsilon(1e-6));
}

TEST_CASE("flac constant and fixed subframes decode") {
  TempDir td;
  std::vector<int16_t> flat(1000, 1234);
  write_bytes(td.file("c.flac"),
              encode_flac_mono16(flat, 16000, FlacSubframeKind::kConstant));
  Waveform wc = load_flac(td.file("c.flac"));
  REQUIRE(wc.samples.size() == 1000);
  CHECK(wc.samples[500] == doctest::Approx(1234 / 32768.0f));

  std::vector<int16_t> ramp(3000);
  for (size_t i = 0; i < ramp.size(); ++i)
    ramp[i] = static_cast<int16_t>(
        std::lround(8000.0 * std::sin(2.0 * M_PI * 60.0 * i / 16000.0)));
  write_bytes(td.file("f.flac"),
              encode_flac_mono16(ramp, 16000, FlacSubframeKind::kFixed1));
  Waveform wf = load_flac(td.file("f.flac"));
  REQUIRE(wf.samples.size() == ramp.size());
  for (size_t i = 0; i < ramp.size(); i += 101)
    CHECK(wf.samples[i] == doctest::Approx(ramp[i] / 32768.0f).epsilon(1e-6));
}

TEST_CASE("load_audio decodes flac by magic and resamples") {
  TempDir td;
  std::vector<int16_t> pcm(32000);
  for (size_t i = 0; i < pcm.size(); ++i)
    pcm[i] = static_cast<int16_t>(
        std::lround(9000.0 * std::sin(2.0 * M_PI * 220.0 * i / 32000.0)));
  write_bytes(td.file("b.flac"), encode_flac_mono16(pcm, 32000));
  Waveform w = load_audio(td.file("b.flac"), 16000);
  CHECK(w.sample_rate == 16000);
  CHECK(std::abs(static_cast<long>(w.samples.size()) - 16000L) <= 1);
}

TEST_CASE("melspec of silence sits exactly at the log floor") {
  MelConfig cfg;
  MelSpectrogram m = melspec(make_silence(1.0), cfg);
  const float floor = std::log(cfg.log_floor);
  CHECK(m.n_frames() >= 1);
  CHECK((m.frames.array() == floor).all());
}

TEST_CASE("pure tone argmax matches analytic mel center") {
  MelConfig cfg;
  MelSpectrogram m = melspec(make_sine(440.0, 1.0), cfg);
  std::vector<double> centers = mel_center_frequencies_hz(cfg);
  int want = 0;
  double best = 1e18;
  for (int i = 0; i < cfg.n_mels; ++i) {
    double d = std::abs(centers[i] - 440.0);
    if (d < best) {
      best = d;
      want = i;
    }
  }
  // Every interior frame peaks at the same analytic bin (edges excluded:
  // reflect padding dilutes the first/last frames).
  for (int t = 3; t < m.n_frames() - 3; ++t) {
    int got = 0;
    m.frames.row(t).maxCoeff(&got);
    CHECK(got == want);
  }
}

TEST_CASE("frame count arithmetic") {
  MelConfig cfg;
  MelSpectrogram m = melspec(make_sine(200.0, 0.5), cfg);
  CHECK(std::abs(m.n_frames() - 50) <= 1);
}

TEST_CASE("melspec deterministic and floored") {
  MelConfig cfg;
  Waveform w = make_sine(700.0, 0.3);
  MelSpectrogram a = melspec(w, cfg);
  MelSpectrogram b = melspec(w, cfg);
  CHECK(a.frames == b.frames);
  CHECK((a.frames.array() >= std::log(cfg.log_floor) - 1e-7f).all());
}

TEST_CASE("frame count is monotone in input length") {
  MelConfig cfg;
  int prev = 0;
  for (double dur : {0.05, 0.1, 0.2, 0.33, 0.5, 0.8, 1.3}) {
    int t = melspec(make_sine(100.0, dur), cfg).n_frames();
    CHECK(t >= prev);
    prev = t;
  }
}

TEST_CASE("melspec rejects rate mismatch") {
  MelConfig cfg;
  CHECK_THROWS_AS(melspec(make_sine(100.0, 0.5, 22050), cfg),
                  ValidationError);
}

TEST_CASE("istft inverts stft away from edges") {
  StftConfig cfg;
  Waveform w = make_sine(330.0, 0.5);
  SpectrogramC spec = stft(w.samples, cfg);
  std::vector<float> back =
      istft(spec, cfg, static_cast<int>(w.samples.size()));
  REQUIRE(back.size() == w.samples.size());
  double err = 0.0, ref = 0.0;
  for (size_t i = 1000; i + 1000 < back.size(); ++i) {
    err += (back[i] - w.samples[i]) * (back[i] - w.samples[i]);
    ref += w.samples[i] * w.samples[i];
  }
  CHECK(std::sqrt(err / ref) < 1e-3);
}
