// src/network.cc

// Copyright 2026  pdspeech authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "pdspeech/nn/network.h"

namespace pdspeech::nn {

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv2d: return "conv2d";
    case LayerKind::MaxPool2d: return "maxpool2d";
    case LayerKind::Dense: return "dense";
    case LayerKind::Dropout: return "dropout";
    case LayerKind::Relu: return "relu";
    case LayerKind::Softmax: return "softmax";
  }
  return "?";
}

LayerKind parse_layer_kind(const std::string& s) {
  for (LayerKind k : {LayerKind::Conv2d, LayerKind::MaxPool2d, LayerKind::Dense, LayerKind::Dropout,
                      LayerKind::Relu, LayerKind::Softmax}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown layer kind: " + s);
}

}  // namespace pdspeech::nn
