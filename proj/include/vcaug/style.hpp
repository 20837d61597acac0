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
// Style encoder: a conv + LSTM reference encoder reduces an utterance's
// feature sequence to one vector; the hierarchical style-token layer
// bottlenecks that vector into the global style vector. Each sublayer
// approximates its input as a convex combination of its tokens and hands
// the residual to the next sublayer.

#pragma once

#include <string>
#include <vector>

#include "vcaug/features.hpp"
#include "vcaug/nn.hpp"

namespace vcaug {

// The reference encoder needs the input to survive its stride-2 stack.
inline constexpr int kReferenceMinFrames = 64;

struct StyleVector {
  VecF s;
  std::string reference_utterance_id;

  int dim() const { return static_cast<int>(s.size()); }
};

template <typename S>
struct ReferenceEncoderT {
  std::vector<ConvBlock<S>> convs;
  LstmCell<S> lstm;
  Linear<S> proj;
  int min_frames = kReferenceMinFrames;

  void init(int feature_dim, const std::vector<int>& channels, int kernel,
            int lstm_hidden, int out_dim, Rng& rng) {
    convs.resize(channels.size());
    int cin = feature_dim;
    for (size_t i = 0; i < channels.size(); ++i) {
      convs[i].init(cin, channels[i], kernel, /*stride=*/2, rng,
                    "er.conv" + std::to_string(i));
      cin = channels[i];
    }
    lstm.init(cin, lstm_hidden, rng, "er.lstm");
    proj.init(lstm_hidden, out_dim, rng, "er.proj");
  }

  // [T x feat] -> [1 x out_dim]; projection of the final LSTM state.
  Var<S> forward(Tape<S>& t, Var<S> x) const {
    require(x.rows() >= min_frames,
            "reference encoder needs at least " +
                std::to_string(min_frames) + " feature frames (" +
                std::to_string(min_frames) + "0 ms), got " +
                std::to_string(x.rows()));
    Var<S> h = x;
    for (const auto& c : convs) h = c.forward(t, h);
    LstmOut<S> out = lstm_run(t, lstm, h);
    return proj.forward(t, out.final_state.h);
  }

  void collect(ParamRegistry<S>& r) {
    for (auto& c : convs) c.collect(r);
    lstm.collect(r);
    proj.collect(r);
  }
};

template <typename S>
struct HgstForward {
  Var<S> style;                    // [1 x d], sum of sublayer combinations
  std::vector<Var<S>> residuals;   // r_2 .. r_{l+1}
  std::vector<Var<S>> weights;     // alpha_1 .. alpha_l, each [1 x h]
};

// Plain-value mirror of HgstForward for the public op.
struct HgstResult {
  VecF style;
  std::vector<VecF> residuals;
  std::vector<VecF> weights;
};

template <typename S>
struct HgstLayerT {
  int sublayers = 3;
  int tokens_per_sublayer = 5;
  int dim = 512;
  int key_dim = 128;
  std::vector<Parameter<S>> tokens;   // per sublayer [h x d]
  std::vector<Parameter<S>> w_query;  // per sublayer [d x dk]
  std::vector<Parameter<S>> w_key;    // per sublayer [d x dk]

  void init(int l, int h, int d, int dk, double token_std, Rng& rng) {
    sublayers = l;
    tokens_per_sublayer = h;
    dim = d;
    key_dim = dk;
    tokens.resize(l);
    w_query.resize(l);
    w_key.resize(l);
    for (int i = 0; i < l; ++i) {
      tokens[i].init_zero(h, d, "hgst.tokens" + std::to_string(i));
      init_gaussian(tokens[i], static_cast<S>(token_std), rng);
      w_query[i].init_zero(d, dk, "hgst.wq" + std::to_string(i));
      init_xavier(w_query[i], d, dk, rng);
      w_key[i].init_zero(d, dk, "hgst.wk" + std::to_string(i));
      init_xavier(w_key[i], d, dk, rng);
    }
  }

  // r [1 x d]. Single-query scaled-dot attention per sublayer; the query
  // is the running residual.
  HgstForward<S> forward(Tape<S>& t, Var<S> r) const {
    auto& self = const_cast<HgstLayerT&>(*this);
    const S inv_sqrt_dk = S(1) / std::sqrt(static_cast<S>(key_dim));
    HgstForward<S> out;
    Var<S> resid = r;
    Var<S> style;
    for (int i = 0; i < sublayers; ++i) {
      Var<S> tok = t.param(self.tokens[i]);
      Var<S> q = t.matmul(resid, t.param(self.w_query[i]));   // [1 x dk]
      Var<S> keys = t.matmul(tok, t.param(self.w_key[i]));    // [h x dk]
      Var<S> scores =
          t.scale(t.matmul(q, t.transpose(keys)), inv_sqrt_dk);  // [1 x h]
      Var<S> alpha = t.softmax_rows(scores);
      Var<S> comb = t.matmul(alpha, tok);  // [1 x d]
      style = (i == 0) ? comb : t.add(style, comb);
      resid = t.sub(resid, comb);
      out.weights.push_back(alpha);
      out.residuals.push_back(resid);
    }
    out.style = style;
    return out;
  }

  void collect(ParamRegistry<S>& r) {
    for (int i = 0; i < sublayers; ++i) {
      r.add(&tokens[i]);
      r.add(&w_query[i]);
      r.add(&w_key[i]);
    }
  }
};

// ----- public ops on the float instantiation -----

// One 512-d vector from a feature sequence (deterministic eval pass).
template <typename S>
Vec<S> encode_reference(const Mat<S>& features,
                        const ReferenceEncoderT<S>& er) {
  require(features.rows() >= 1, "encode_reference: empty features");
  require(all_finite(features), "encode_reference: non-finite features");
  Tape<S> t;
  Var<S> y = er.forward(t, t.constant(features));
  return t.value(y).row(0).transpose();
}

inline VecF encode_reference(const FeatureSequence& f,
                             const ReferenceEncoderT<float>& er) {
  return encode_reference<float>(f.vectors, er);
}

template <typename S>
HgstResult hgst_forward_values(const Vec<S>& r, const HgstLayerT<S>& g) {
  require(r.allFinite(), "hgst_forward: non-finite input");
  require(static_cast<int>(r.size()) == g.dim,
          "hgst_forward: dimension mismatch");
  Tape<S> t;
  Mat<S> rm = r.transpose();
  HgstForward<S> f = g.forward(t, t.constant(rm));
  HgstResult out;
  out.style = t.value(f.style).row(0).transpose().template cast<float>();
  for (const auto& v : f.residuals)
    out.residuals.push_back(
        t.value(v).row(0).transpose().template cast<float>());
  for (const auto& v : f.weights)
    out.weights.push_back(
        t.value(v).row(0).transpose().template cast<float>());
  return out;
}

// Full style path: features -> reference encoder -> style tokens.
StyleVector style_of(const Waveform& reference,
                     SpeechEncoderBackend& backend,
                     const ReferenceEncoderT<float>& er,
                     const HgstLayerT<float>& hgst,
                     const std::string& reference_id = "");

}  // namespace vcaug
