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

#include "vcaug/style.hpp"

namespace vcaug {

StyleVector style_of(const Waveform& reference,
                     SpeechEncoderBackend& backend,
                     const ReferenceEncoderT<float>& er,
                     const HgstLayerT<float>& hgst,
                     const std::string& reference_id) {
  FeatureSequence f = encode(reference, backend);
  VecF r = encode_reference(f, er);
  HgstResult h = hgst_forward_values<float>(r, hgst);
  StyleVector s;
  s.s = h.style;
  s.reference_utterance_id = reference_id;
  require(s.s.allFinite(), "style_of: non-finite style vector");
  return s;
}

}  // namespace vcaug
