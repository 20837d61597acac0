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

#include "vcaug/content.hpp"
#include "vcaug/decoder.hpp"
#include "vcaug/style.hpp"

namespace vcaug {

struct ModelDims {
  int feature_dim = kFeatureDim;
  int model_dim = 512;
  std::vector<int> conv_channels{32, 32, 64, 64, 128, 128};
  int conv_kernel = 9;
  int enc_lstm_hidden = 256;
  int hgst_sublayers = 3;
  int hgst_tokens = 5;
  int hgst_key_dim = 128;
  double token_init_std = 0.3;
  int content_stride = 1;
  DecoderDims decoder;

  static ModelDims full() { return ModelDims{}; }

  // All widths 32 (mel bins and the 512-d feature input stay fixed).
  static ModelDims tiny() {
    ModelDims d;
    d.model_dim = 32;
    d.conv_channels = {32, 32, 32, 32, 32, 32};
    d.enc_lstm_hidden = 32;
    d.hgst_key_dim = 16;
    d.decoder.memory_dim = 32;
    d.decoder.prenet_dim = 32;
    d.decoder.att_rnn_dim = 32;
    d.decoder.att_dim = 16;
    d.decoder.loc_filters = 8;
    d.decoder.loc_kernel = 15;
    d.decoder.dec_rnn_dim = 32;
    d.decoder.postnet_channels = 32;
    d.decoder.postnet_layers = 3;
    return d;
  }

  // Finite-difference scale: everything single digit.
  static ModelDims micro() {
    ModelDims d;
    d.feature_dim = 8;
    d.model_dim = 8;
    d.conv_channels = {8, 8};
    d.conv_kernel = 3;
    d.enc_lstm_hidden = 6;
    d.hgst_sublayers = 2;
    d.hgst_tokens = 3;
    d.hgst_key_dim = 4;
    d.decoder.memory_dim = 8;
    d.decoder.n_mels = 4;
    d.decoder.prenet_dim = 8;
    d.decoder.att_rnn_dim = 8;
    d.decoder.att_dim = 4;
    d.decoder.loc_filters = 2;
    d.decoder.loc_kernel = 5;
    d.decoder.dec_rnn_dim = 8;
    d.decoder.postnet_channels = 8;
    d.decoder.postnet_kernel = 3;
    d.decoder.postnet_layers = 2;
    return d;
  }
};

// The trainable modules (the speech encoder and quantizer stay outside:
// they are frozen artifacts).
template <typename S>
struct VcModelT {
  ModelDims dims;
  ReferenceEncoderT<S> er;
  HgstLayerT<S> hgst;
  ContentEncoderT<S> ec;
  SpectrogramDecoderT<S> dec;
  ParamRegistry<S> params;

  void init(const ModelDims& d, uint64_t seed) {
    dims = d;
    Rng rng(seed);
    er.init(d.feature_dim, d.conv_channels, d.conv_kernel, d.enc_lstm_hidden,
            d.model_dim, rng);
    hgst.init(d.hgst_sublayers, d.hgst_tokens, d.model_dim, d.hgst_key_dim,
              d.token_init_std, rng);
    ec.init(d.feature_dim, d.conv_channels, d.conv_kernel, d.enc_lstm_hidden,
            d.model_dim, d.content_stride, rng);
    dec.init(d.decoder, rng);
    params = ParamRegistry<S>{};
    er.collect(params);
    hgst.collect(params);
    ec.collect(params);
    dec.collect(params);
  }
};

using VcModel = VcModelT<float>;

}  // namespace vcaug
