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
// Content encoder: same layer types as the reference encoder but keeps
// every LSTM state, one content vector per frame. Stride defaults to 1 so
// the stated 10 ms content rate holds; a stride-2 variant is available
// behind config.

#pragma once

#include <string>
#include <vector>

#include "vcaug/features.hpp"
#include "vcaug/nn.hpp"

namespace vcaug {

struct ContentSequence {
  MatF vectors;  // [T' x dim]
  double frame_hop_s = kFeatureHopS;

  int n_frames() const { return static_cast<int>(vectors.rows()); }
  int dim() const { return static_cast<int>(vectors.cols()); }
};

template <typename S>
struct ContentEncoderT {
  std::vector<ConvBlock<S>> convs;
  LstmCell<S> lstm;
  Linear<S> proj;
  int stride = 1;

  void init(int feature_dim, const std::vector<int>& channels, int kernel,
            int lstm_hidden, int out_dim, int conv_stride, Rng& rng) {
    stride = conv_stride;
    convs.resize(channels.size());
    int cin = feature_dim;
    for (size_t i = 0; i < channels.size(); ++i) {
      convs[i].init(cin, channels[i], kernel, conv_stride, rng,
                    "ec.conv" + std::to_string(i));
      cin = channels[i];
    }
    lstm.init(cin, lstm_hidden, rng, "ec.lstm");
    proj.init(lstm_hidden, out_dim, rng, "ec.proj");
  }

  // [T x feat] -> [T' x out_dim], every LSTM state projected.
  Var<S> forward(Tape<S>& t, Var<S> x) const {
    require(x.rows() >= 1, "content encoder: empty input");
    Var<S> h = x;
    for (const auto& c : convs) h = c.forward(t, h);
    LstmOut<S> out = lstm_run(t, lstm, h);
    return proj.forward(t, out.states);
  }

  // Output length for a given input length (stride arithmetic only).
  Eigen::Index output_frames(Eigen::Index input_frames) const {
    Eigen::Index n = input_frames;
    for (size_t i = 0; i < convs.size(); ++i) n = (n + stride - 1) / stride;
    return n;
  }

  void collect(ParamRegistry<S>& r) {
    for (auto& c : convs) c.collect(r);
    lstm.collect(r);
    proj.collect(r);
  }
};

template <typename S>
ContentSequence encode_content_values(const Mat<S>& quantized,
                                      const ContentEncoderT<S>& ec) {
  require(quantized.rows() >= 1, "encode_content: empty input");
  Tape<S> t;
  Var<S> y = ec.forward(t, t.constant(quantized));
  ContentSequence out;
  out.vectors = t.value(y).template cast<float>();
  return out;
}

inline ContentSequence encode_content(const FeatureSequence& qf,
                                      const ContentEncoderT<float>& ec) {
  ContentSequence out = encode_content_values<float>(qf.vectors, ec);
  out.frame_hop_s = qf.frame_hop_s;
  for (size_t i = 0; i < ec.convs.size(); ++i)
    out.frame_hop_s *= ec.stride;
  return out;
}

}  // namespace vcaug
