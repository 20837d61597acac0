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
// Autoregressive spectrogram decoder: prenet -> attention LSTM ->
// location-sensitive attention over the fused content sequence ->
// decoder LSTM -> frame + stop projections, with a convolutional
// post-net residual. One mel frame per step (reduction factor 1).

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vcaug/content.hpp"
#include "vcaug/nn.hpp"
#include "vcaug/style.hpp"

namespace vcaug {

struct DecoderDims {
  int memory_dim = 512;
  int n_mels = 80;
  int prenet_dim = 256;
  int att_rnn_dim = 1024;
  int att_dim = 128;
  int loc_filters = 32;
  int loc_kernel = 31;
  int dec_rnn_dim = 1024;
  int postnet_channels = 512;
  int postnet_kernel = 5;
  int postnet_layers = 5;
  double stop_threshold = 0.5;
  double max_steps_factor = 2.0;
};

template <typename S>
struct DecodeVars {
  Var<S> mel;          // [T_out x n_mels], post-net applied
  Var<S> stop_logits;  // [T_out x 1]
  Mat<S> alignment;    // [T_out x T'] attention weights (values)
  bool truncated = false;
};

struct DecoderOutput {
  MatF mel;        // [T_out x n_mels]
  VecF stop_probs; // in [0, 1]
  MatF alignment;  // rows on the simplex
  bool truncated = false;

  int n_frames() const { return static_cast<int>(mel.rows()); }
};

template <typename S>
struct ReconstructionLossT {
  S l2_term = 0;
  S stop_term = 0;
  S total = 0;
};
using ReconstructionLoss = ReconstructionLossT<float>;

template <typename S>
struct SpectrogramDecoderT {
  DecoderDims dims;
  Linear<S> prenet1, prenet2;
  LstmCell<S> att_rnn;
  Linear<S> mem_proj;
  Linear<S> query_proj;
  Parameter<S> loc_w;  // [loc_kernel*2 x loc_filters]
  Parameter<S> loc_b;  // [1 x loc_filters]
  Linear<S> loc_proj;
  Parameter<S> v_att;  // [att_dim x 1]
  LstmCell<S> dec_rnn;
  Linear<S> out_proj;
  Linear<S> stop_proj;
  std::vector<ConvBlock<S>> postnet;

  void init(const DecoderDims& d, Rng& rng) {
    dims = d;
    prenet1.init(d.n_mels, d.prenet_dim, rng, "dec.prenet1");
    prenet2.init(d.prenet_dim, d.prenet_dim, rng, "dec.prenet2");
    att_rnn.init(d.prenet_dim + d.memory_dim, d.att_rnn_dim, rng,
                 "dec.att_rnn");
    mem_proj.init(d.memory_dim, d.att_dim, rng, "dec.mem_proj");
    query_proj.init(d.att_rnn_dim, d.att_dim, rng, "dec.query_proj");
    loc_w.init_zero(d.loc_kernel * 2, d.loc_filters, "dec.loc_w");
    init_xavier(loc_w, d.loc_kernel * 2, d.loc_filters, rng);
    loc_b.init_zero(1, d.loc_filters, "dec.loc_b");
    loc_proj.init(d.loc_filters, d.att_dim, rng, "dec.loc_proj");
    v_att.init_zero(d.att_dim, 1, "dec.v_att");
    init_xavier(v_att, d.att_dim, 1, rng);
    dec_rnn.init(d.att_rnn_dim + d.memory_dim, d.dec_rnn_dim, rng,
                 "dec.dec_rnn");
    out_proj.init(d.dec_rnn_dim + d.memory_dim, d.n_mels, rng,
                  "dec.out_proj");
    stop_proj.init(d.dec_rnn_dim + d.memory_dim, 1, rng, "dec.stop_proj");

    postnet.resize(d.postnet_layers);
    int cin = d.n_mels;
    for (int i = 0; i < d.postnet_layers; ++i) {
      const bool last = (i == d.postnet_layers - 1);
      const int cout = last ? d.n_mels : d.postnet_channels;
      postnet[i].init(cin, cout, d.postnet_kernel, 1, rng,
                      "dec.postnet" + std::to_string(i),
                      last ? ConvAct::kNone : ConvAct::kTanh,
                      /*norm=*/!last);
      cin = cout;
    }
  }

  Var<S> run_postnet(Tape<S>& t, Var<S> mel_pre) const {
    Var<S> h = mel_pre;
    for (const auto& blk : postnet) h = blk.forward(t, h);
    return t.add(mel_pre, h);
  }

  // Teacher-forced when teacher != nullptr (T_out = teacher rows);
  // free-running otherwise, stopping on the stop gate or at
  // max_steps_factor * T'.
  DecodeVars<S> decode_on_tape(Tape<S>& t, Var<S> memory,
                               const Mat<S>* teacher) const {
    auto& self = const_cast<SpectrogramDecoderT&>(*this);
    const Eigen::Index t_in = memory.rows();
    require(t_in >= 1, "decode: empty content sequence");
    if (teacher != nullptr)
      require(teacher->cols() == dims.n_mels,
              "decode: teacher mel width mismatch");

    Var<S> pm = mem_proj.forward(t, memory);  // [T' x A]

    typename LstmCell<S>::State as = att_rnn.initial(t);
    typename LstmCell<S>::State ds = dec_rnn.initial(t);
    Mat<S> a0 = Mat<S>::Zero(1, t_in);
    a0(0, 0) = S(1);
    Var<S> alpha = t.constant(a0);
    Var<S> alpha_cum = alpha;
    Var<S> context = t.matmul(alpha, memory);
    Var<S> prev = t.constant(Mat<S>::Zero(1, dims.n_mels));

    const int max_steps =
        teacher != nullptr
            ? static_cast<int>(teacher->rows())
            : std::max<int>(1, static_cast<int>(dims.max_steps_factor *
                                                static_cast<double>(t_in)));

    std::vector<Var<S>> frames, stops;
    std::vector<Mat<S>> align_rows;
    bool stopped = false;
    for (int step = 0; step < max_steps; ++step) {
      Var<S> p = t.relu(prenet2.forward(t, t.relu(prenet1.forward(t, prev))));
      as = att_rnn.step(t, t.concat_cols(p, context), as);

      Var<S> loc_in =
          t.concat_cols(t.transpose(alpha), t.transpose(alpha_cum));
      Var<S> loc = t.conv1d(loc_in, t.param(self.loc_w), t.param(self.loc_b),
                            dims.loc_kernel, 1);
      Var<S> lfeat = loc_proj.forward(t, loc);                  // [T' x A]
      Var<S> q = query_proj.forward(t, as.h);                   // [1 x A]
      Var<S> e = t.matmul(t.tanh_(t.add_row(t.add(pm, lfeat), q)),
                          t.param(self.v_att));                 // [T' x 1]
      alpha = t.softmax_rows(t.transpose(e));                   // [1 x T']
      alpha_cum = t.add(alpha_cum, alpha);
      context = t.matmul(alpha, memory);

      ds = dec_rnn.step(t, t.concat_cols(as.h, context), ds);
      Var<S> feat = t.concat_cols(ds.h, context);
      Var<S> frame = out_proj.forward(t, feat);
      Var<S> stop_logit = stop_proj.forward(t, feat);

      frames.push_back(frame);
      stops.push_back(stop_logit);
      align_rows.push_back(t.value(alpha));

      if (teacher != nullptr) {
        prev = t.constant(teacher->row(step));
      } else {
        prev = t.detach(frame);
        const S prob =
            S(1) / (S(1) + std::exp(-t.value(stop_logit)(0, 0)));
        if (prob > static_cast<S>(dims.stop_threshold)) {
          stopped = true;
          break;
        }
      }
    }

    DecodeVars<S> out;
    Var<S> mel_pre = t.concat_rows(frames);
    out.mel = run_postnet(t, mel_pre);
    out.stop_logits = t.concat_rows(stops);
    out.alignment.resize(static_cast<Eigen::Index>(align_rows.size()), t_in);
    for (size_t i = 0; i < align_rows.size(); ++i)
      out.alignment.row(static_cast<Eigen::Index>(i)) = align_rows[i].row(0);
    out.truncated = (teacher == nullptr) && !stopped;
    return out;
  }

  void collect(ParamRegistry<S>& r) {
    prenet1.collect(r);
    prenet2.collect(r);
    att_rnn.collect(r);
    mem_proj.collect(r);
    query_proj.collect(r);
    r.add(&loc_w);
    r.add(&loc_b);
    loc_proj.collect(r);
    r.add(&v_att);
    dec_rnn.collect(r);
    out_proj.collect(r);
    stop_proj.collect(r);
    for (auto& blk : postnet) blk.collect(r);
  }
};

// content[t] + s, elementwise; length preserved.
inline MatF fuse(const MatF& content, const VecF& s) {
  require(content.cols() == s.size(), "fuse: dimension mismatch");
  MatF out = content;
  out.rowwise() += s.transpose();
  return out;
}

inline ContentSequence fuse(const ContentSequence& content,
                            const StyleVector& s) {
  ContentSequence out = content;
  out.vectors = fuse(content.vectors, s.s);
  return out;
}

// Plain-value decode for inference and tests.
template <typename S>
DecoderOutput decode(const Mat<S>& fused, const SpectrogramDecoderT<S>& dec,
                     const std::optional<Mat<S>>& teacher = std::nullopt) {
  require(fused.rows() >= 1, "decode: empty content sequence");
  require(fused.cols() == dec.dims.memory_dim,
          "decode: content width mismatch");
  Tape<S> t;
  const Mat<S>* teach = teacher.has_value() ? &teacher.value() : nullptr;
  DecodeVars<S> v = dec.decode_on_tape(t, t.constant(fused), teach);
  DecoderOutput out;
  out.mel = t.value(v.mel).template cast<float>();
  Mat<S> logits = t.value(v.stop_logits);
  out.stop_probs.resize(logits.rows());
  for (Eigen::Index i = 0; i < logits.rows(); ++i)
    out.stop_probs[i] =
        static_cast<float>(S(1) / (S(1) + std::exp(-logits(i, 0))));
  out.alignment = v.alignment.template cast<float>();
  out.truncated = v.truncated;
  return out;
}

inline constexpr double kStopWeight = 1.0;
inline constexpr double kStopPosWeight = 5.0;

// Stop targets: 1 at the final frame, 0 elsewhere.
template <typename S>
Vec<S> stop_targets(Eigen::Index n) {
  Vec<S> y = Vec<S>::Zero(n);
  y[n - 1] = S(1);
  return y;
}

// L2 term: mean squared error over all frames/bins. Stop term: weighted
// mean binary cross-entropy (positive class weight 5) against
// stop_targets. total = l2 + stop_weight * stop.
template <typename S>
ReconstructionLossT<S> reconstruction_loss(const Mat<S>& pred_mel,
                                           const Vec<S>& stop_probs,
                                           const Mat<S>& target) {
  require(pred_mel.rows() == target.rows() &&
              pred_mel.cols() == target.cols(),
          "reconstruction_loss: shape mismatch");
  require(stop_probs.size() == pred_mel.rows(),
          "reconstruction_loss: stop length mismatch");
  ReconstructionLossT<S> loss;
  loss.l2_term = (pred_mel - target).squaredNorm() /
                 static_cast<S>(target.size());
  const Vec<S> y = stop_targets<S>(stop_probs.size());
  S acc = 0;
  for (Eigen::Index i = 0; i < stop_probs.size(); ++i) {
    const S p = std::min(std::max(stop_probs[i], S(1e-7)), S(1) - S(1e-7));
    if (y[i] > S(0.5)) {
      acc += -static_cast<S>(kStopPosWeight) * std::log(p);
    } else {
      acc += -std::log(S(1) - p);
    }
  }
  loss.stop_term = acc / static_cast<S>(stop_probs.size());
  loss.total = loss.l2_term + static_cast<S>(kStopWeight) * loss.stop_term;
  return loss;
}

inline ReconstructionLoss reconstruction_loss(const DecoderOutput& pred,
                                              const MatF& target_mel) {
  VecF probs = pred.stop_probs;
  return reconstruction_loss<float>(pred.mel, probs, target_mel);
}

}  // namespace vcaug
