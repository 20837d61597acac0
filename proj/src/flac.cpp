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
//
// Minimal native FLAC decoder: STREAMINFO + audio frames with
// constant / verbatim / fixed / LPC subframes and Rice-coded residuals.
// No seeking, no ogg container.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "vcaug/audio.hpp"
#include "vcaug/common.hpp"

namespace vcaug {

namespace {

class BitReader {
 public:
  BitReader(const uint8_t* data, size_t size) : data_(data), size_(size) {}

  bool eof() const { return byte_ >= size_; }
  size_t byte_pos() const { return byte_; }

  uint32_t read_bit() {
    if (byte_ >= size_) throw IoError("FLAC: unexpected end of stream");
    uint32_t b = (data_[byte_] >> (7 - bit_)) & 1u;
    if (++bit_ == 8) {
      bit_ = 0;
      ++byte_;
    }
    return b;
  }

  uint64_t read_bits(int n) {
    uint64_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 1) | read_bit();
    return v;
  }

  int64_t read_signed(int n) {
    uint64_t v = read_bits(n);
    if (n > 0 && (v >> (n - 1)) & 1u) {
      v |= ~((uint64_t{1} << n) - 1);  // sign extend
    }
    return static_cast<int64_t>(v);
  }

  uint64_t read_unary() {
    uint64_t q = 0;
    while (read_bit() == 0) ++q;
    return q;
  }

  int64_t read_rice(int param) {
    uint64_t q = read_unary();
    uint64_t u = (q << param) | read_bits(param);
    return static_cast<int64_t>(u >> 1) ^ -static_cast<int64_t>(u & 1);
  }

  void align_to_byte() {
    if (bit_ != 0) {
      bit_ = 0;
      ++byte_;
    }
  }

 private:
  const uint8_t* data_;
  size_t size_;
  size_t byte_ = 0;
  int bit_ = 0;
};

struct StreamInfo {
  int sample_rate = 0;
  int channels = 0;
  int bits_per_sample = 0;
  uint64_t total_samples = 0;
};

// CRC-8 over the frame header, polynomial x^8 + x^2 + x + 1.
uint8_t crc8(const uint8_t* data, size_t n) {
  uint8_t crc = 0;
  for (size_t i = 0; i < n; ++i) {
    crc ^= data[i];
    for (int b = 0; b < 8; ++b)
      crc = (crc & 0x80) ? static_cast<uint8_t>((crc << 1) ^ 0x07)
                         : static_cast<uint8_t>(crc << 1);
  }
  return crc;
}

// CRC-16 over the whole frame, polynomial x^16 + x^15 + x^2 + 1.
uint16_t crc16(const uint8_t* data, size_t n) {
  uint16_t crc = 0;
  for (size_t i = 0; i < n; ++i) {
    crc ^= static_cast<uint16_t>(data[i]) << 8;
    for (int b = 0; b < 8; ++b)
      crc = (crc & 0x8000) ? static_cast<uint16_t>((crc << 1) ^ 0x8005)
                           : static_cast<uint16_t>(crc << 1);
  }
  return crc;
}

uint64_t read_coded_number(BitReader& br) {
  uint64_t b0 = br.read_bits(8);
  int extra = 0;
  uint64_t v = 0;
  if (b0 < 0x80) return b0;
  if ((b0 & 0xE0) == 0xC0) {
    extra = 1;
    v = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    extra = 2;
    v = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    extra = 3;
    v = b0 & 0x07;
  } else if ((b0 & 0xFC) == 0xF8) {
    extra = 4;
    v = b0 & 0x03;
  } else if ((b0 & 0xFE) == 0xFC) {
    extra = 5;
    v = b0 & 0x01;
  } else if (b0 == 0xFE) {
    extra = 6;
    v = 0;
  } else {
    throw IoError("FLAC: invalid coded frame number");
  }
  for (int i = 0; i < extra; ++i) {
    uint64_t b = br.read_bits(8);
    if ((b & 0xC0) != 0x80) throw IoError("FLAC: invalid coded frame number");
    v = (v << 6) | (b & 0x3F);
  }
  return v;
}

void read_residual(BitReader& br, int blocksize, int predictor_order,
                   std::vector<int64_t>* out) {
  int method = static_cast<int>(br.read_bits(2));
  if (method > 1) throw IoError("FLAC: reserved residual coding method");
  int param_bits = method == 0 ? 4 : 5;
  int escape = method == 0 ? 0xF : 0x1F;
  int partition_order = static_cast<int>(br.read_bits(4));
  int partitions = 1 << partition_order;
  if (blocksize % partitions != 0)
    throw IoError("FLAC: invalid residual partition order");
  for (int p = 0; p < partitions; ++p) {
    int count = blocksize >> partition_order;
    if (p == 0) count -= predictor_order;
    if (count < 0) throw IoError("FLAC: partition shorter than order");
    int param = static_cast<int>(br.read_bits(param_bits));
    if (param == escape) {
      int raw_bits = static_cast<int>(br.read_bits(5));
      for (int i = 0; i < count; ++i)
        out->push_back(raw_bits == 0 ? 0 : br.read_signed(raw_bits));
    } else {
      for (int i = 0; i < count; ++i) out->push_back(br.read_rice(param));
    }
  }
}

void decode_subframe(BitReader& br, int blocksize, int bps,
                     std::vector<int64_t>* samples) {
  if (br.read_bit() != 0) throw IoError("FLAC: bad subframe padding bit");
  int type = static_cast<int>(br.read_bits(6));
  int wasted = 0;
  if (br.read_bit() == 1) wasted = 1 + static_cast<int>(br.read_unary());
  bps -= wasted;

  samples->clear();
  samples->reserve(blocksize);

  if (type == 0) {  // constant
    int64_t v = br.read_signed(bps);
    samples->assign(blocksize, v);
  } else if (type == 1) {  // verbatim
    for (int i = 0; i < blocksize; ++i) samples->push_back(br.read_signed(bps));
  } else if (type >= 8 && type <= 12) {  // fixed predictor
    int order = type - 8;
    for (int i = 0; i < order; ++i) samples->push_back(br.read_signed(bps));
    std::vector<int64_t> resid;
    read_residual(br, blocksize, order, &resid);
    for (size_t i = 0; i < resid.size(); ++i) {
      size_t n = samples->size();
      int64_t pred = 0;
      switch (order) {
        case 0: pred = 0; break;
        case 1: pred = (*samples)[n - 1]; break;
        case 2: pred = 2 * (*samples)[n - 1] - (*samples)[n - 2]; break;
        case 3:
          pred = 3 * (*samples)[n - 1] - 3 * (*samples)[n - 2] +
                 (*samples)[n - 3];
          break;
        case 4:
          pred = 4 * (*samples)[n - 1] - 6 * (*samples)[n - 2] +
                 4 * (*samples)[n - 3] - (*samples)[n - 4];
          break;
        default: break;
      }
      samples->push_back(resid[i] + pred);
    }
  } else if (type >= 32) {  // LPC
    int order = (type & 31) + 1;
    for (int i = 0; i < order; ++i) samples->push_back(br.read_signed(bps));
    int precision = static_cast<int>(br.read_bits(4)) + 1;
    if (precision == 16) throw IoError("FLAC: invalid LPC precision");
    int shift = static_cast<int>(br.read_signed(5));
    if (shift < 0) throw IoError("FLAC: negative LPC shift");
    std::vector<int64_t> coefs(order);
    for (int i = 0; i < order; ++i) coefs[i] = br.read_signed(precision);
    std::vector<int64_t> resid;
    read_residual(br, blocksize, order, &resid);
    for (size_t i = 0; i < resid.size(); ++i) {
      size_t n = samples->size();
      int64_t acc = 0;
      for (int j = 0; j < order; ++j)
        acc += coefs[j] * (*samples)[n - 1 - j];
      samples->push_back(resid[i] + (acc >> shift));
    }
  } else {
    throw IoError("FLAC: reserved subframe type");
  }

  if (wasted > 0)
    for (auto& s : *samples) s <<= wasted;
}

}  // namespace

Waveform load_flac(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open audio file: " + path);
  std::vector<uint8_t> buf((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
  if (buf.size() < 42 || std::memcmp(buf.data(), "fLaC", 4) != 0)
    throw IoError("not a FLAC file: " + path);

  BitReader br(buf.data(), buf.size());
  br.read_bits(32);  // magic

  StreamInfo info;
  bool have_streaminfo = false;
  for (;;) {
    uint32_t last = br.read_bit();
    uint32_t type = static_cast<uint32_t>(br.read_bits(7));
    uint32_t len = static_cast<uint32_t>(br.read_bits(24));
    if (type == 0) {
      if (len != 34) throw IoError("FLAC: bad STREAMINFO length");
      br.read_bits(16);  // min blocksize
      br.read_bits(16);  // max blocksize
      br.read_bits(24);  // min framesize
      br.read_bits(24);  // max framesize
      info.sample_rate = static_cast<int>(br.read_bits(20));
      info.channels = static_cast<int>(br.read_bits(3)) + 1;
      info.bits_per_sample = static_cast<int>(br.read_bits(5)) + 1;
      info.total_samples = br.read_bits(36);
      br.read_bits(64);  // md5 (hi)
      br.read_bits(64);  // md5 (lo)
      have_streaminfo = true;
    } else {
      for (uint32_t i = 0; i < len; ++i) br.read_bits(8);
    }
    if (last) break;
  }
  if (!have_streaminfo || info.sample_rate <= 0)
    throw IoError("FLAC: missing STREAMINFO: " + path);
  if (info.channels < 1 || info.channels > 8)
    throw IoError("FLAC: unsupported channel count");

  std::vector<std::vector<int64_t>> channel(info.channels);
  std::vector<int64_t> sub;
  std::vector<std::vector<int64_t>> subframes;

  // Frames are byte-aligned and run to end of stream.
  while (!br.eof()) {
    size_t frame_start = br.byte_pos();
    uint32_t sync = static_cast<uint32_t>(br.read_bits(14));
    if (sync != 0x3FFE) throw IoError("FLAC: lost frame sync");
    br.read_bit();  // reserved
    br.read_bit();  // blocking strategy
    int bs_code = static_cast<int>(br.read_bits(4));
    int sr_code = static_cast<int>(br.read_bits(4));
    int ch_assign = static_cast<int>(br.read_bits(4));
    int ss_code = static_cast<int>(br.read_bits(3));
    br.read_bit();  // reserved
    read_coded_number(br);

    int blocksize;
    switch (bs_code) {
      case 0: throw IoError("FLAC: reserved blocksize code");
      case 1: blocksize = 192; break;
      case 6: blocksize = static_cast<int>(br.read_bits(8)) + 1; break;
      case 7: blocksize = static_cast<int>(br.read_bits(16)) + 1; break;
      default:
        blocksize = (bs_code <= 5) ? 576 << (bs_code - 2)
                                   : 256 << (bs_code - 8);
    }
    if (sr_code == 12) br.read_bits(8);
    if (sr_code == 13 || sr_code == 14) br.read_bits(16);

    int bps;
    switch (ss_code) {
      case 0: bps = info.bits_per_sample; break;
      case 1: bps = 8; break;
      case 2: bps = 12; break;
      case 4: bps = 16; break;
      case 5: bps = 20; break;
      case 6: bps = 24; break;
      case 7: bps = 32; break;
      default: throw IoError("FLAC: reserved sample size code");
    }

    size_t header_end = br.byte_pos();
    uint8_t expect_crc8 = static_cast<uint8_t>(br.read_bits(8));
    if (crc8(buf.data() + frame_start, header_end - frame_start) != expect_crc8)
      throw IoError("FLAC: frame header CRC mismatch");

    int nch = ch_assign < 8 ? ch_assign + 1 : 2;
    if (nch != info.channels)
      throw IoError("FLAC: frame channel count differs from STREAMINFO");

    subframes.assign(nch, {});
    for (int c = 0; c < nch; ++c) {
      int sub_bps = bps;
      if ((ch_assign == 8 && c == 1) || (ch_assign == 9 && c == 0) ||
          (ch_assign == 10 && c == 1)) {
        ++sub_bps;  // side channel carries one extra bit
      }
      decode_subframe(br, blocksize, sub_bps, &sub);
      subframes[c] = sub;
    }
    br.align_to_byte();
    size_t frame_end = br.byte_pos();
    uint16_t expect_crc16 = static_cast<uint16_t>(br.read_bits(16));
    if (crc16(buf.data() + frame_start, frame_end - frame_start) !=
        expect_crc16)
      throw IoError("FLAC: frame CRC mismatch");

    if (ch_assign == 8) {  // left/side
      for (int i = 0; i < blocksize; ++i)
        subframes[1][i] = subframes[0][i] - subframes[1][i];
    } else if (ch_assign == 9) {  // right/side
      for (int i = 0; i < blocksize; ++i)
        subframes[0][i] = subframes[1][i] + subframes[0][i];
    } else if (ch_assign == 10) {  // mid/side
      for (int i = 0; i < blocksize; ++i) {
        int64_t side = subframes[1][i];
        int64_t mid = (subframes[0][i] << 1) | (side & 1);
        subframes[0][i] = (mid + side) >> 1;
        subframes[1][i] = (mid - side) >> 1;
      }
    }
    for (int c = 0; c < info.channels; ++c)
      channel[c].insert(channel[c].end(), subframes[c].begin(),
                        subframes[c].end());
  }

  size_t n = channel[0].size();
  if (info.total_samples > 0 && n > info.total_samples)
    n = static_cast<size_t>(info.total_samples);
  const double scale = 1.0 / std::ldexp(1.0, info.bits_per_sample - 1);
  Waveform w;
  w.sample_rate = info.sample_rate;
  w.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int c = 0; c < info.channels; ++c)
      acc += static_cast<double>(channel[c][i]) * scale;
    w.samples[i] = static_cast<float>(acc / info.channels);
  }
  return w;
}

}  // namespace vcaug
