// include/pdspeech/nn/adam.h

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

#ifndef PDSPEECH_NN_ADAM_H_
#define PDSPEECH_NN_ADAM_H_

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "pdspeech/common.h"

namespace pdspeech::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  AdamConfig config;
  std::uint64_t step_count = 0;
  std::vector<T> m;  // first moments, one per parameter
  std::vector<T> v;  // second moments

  AdamState() = default;
  AdamState(const AdamConfig& c, std::size_t n_params) : config(c), m(n_params, T{}), v(n_params, T{}) {
    if (!(c.lr > 0.0) || !(c.beta1 > 0.0 && c.beta1 < 1.0) || !(c.beta2 > 0.0 && c.beta2 < 1.0) ||
        !(c.epsilon > 0.0)) {
      throw ConfigError("adam: need lr > 0, beta1/beta2 in (0, 1), epsilon > 0");
    }
  }
};

template <typename T>
void adam_step(std::span<T> params, std::span<const T> grads, AdamState<T>& state) {
  if (params.size() != grads.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ShapeError("adam_step: parameter, gradient and moment sizes differ");
  }
  const AdamConfig& c = state.config;
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double corr1 = 1.0 - std::pow(c.beta1, t);
  const double corr2 = 1.0 - std::pow(c.beta2, t);
  const T b1 = static_cast<T>(c.beta1), b2 = static_cast<T>(c.beta2);
  const T step = static_cast<T>(c.lr / corr1);
  const T inv_sqrt_corr2 = static_cast<T>(1.0 / std::sqrt(corr2));
  const T eps = static_cast<T>(c.epsilon);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const T g = grads[i];
    state.m[i] = b1 * state.m[i] + (T{1} - b1) * g;
    state.v[i] = b2 * state.v[i] + (T{1} - b2) * g * g;
    params[i] -= step * state.m[i] / (std::sqrt(state.v[i]) * inv_sqrt_corr2 + eps);
  }
}

}  // namespace pdspeech::nn

#endif  // PDSPEECH_NN_ADAM_H_
