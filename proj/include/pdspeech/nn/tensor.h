// include/pdspeech/nn/tensor.h

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

#ifndef PDSPEECH_NN_TENSOR_H_
#define PDSPEECH_NN_TENSOR_H_

#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "pdspeech/common.h"

namespace pdspeech::nn {

inline std::size_t shape_size(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string shape_string(const std::vector<std::size_t>& shape) {
  std::string s;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s;
}

// Row-major n-d array with an optional gradient buffer of the same length.
template <typename T>
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<T> data;
  std::optional<std::vector<T>> grad;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s, T fill = T{})
      : shape(std::move(s)), data(shape_size(shape), fill) {}

  std::size_t size() const { return data.size(); }

  void reshape(std::vector<std::size_t> s) {
    if (shape_size(s) != data.size()) {
      throw ShapeError("reshape " + shape_string(shape) + " -> " + shape_string(s));
    }
    shape = std::move(s);
  }

  void enable_grad() { grad.emplace(data.size(), T{}); }

  bool all_finite() const {
    for (const T& v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
};

}  // namespace pdspeech::nn

#endif  // PDSPEECH_NN_TENSOR_H_
