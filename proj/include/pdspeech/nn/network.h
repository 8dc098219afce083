// include/pdspeech/nn/network.h

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

#ifndef PDSPEECH_NN_NETWORK_H_
#define PDSPEECH_NN_NETWORK_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pdspeech/common.h"
#include "pdspeech/nn/kernels.h"
#include "pdspeech/nn/tensor.h"

namespace pdspeech::nn {

enum class LayerKind { Conv2d, MaxPool2d, Dense, Dropout, Relu, Softmax };

std::string to_string(LayerKind kind);
LayerKind parse_layer_kind(const std::string& s);

// Conv2d: in/out are channel counts (3x3 kernel, stride 1, zero pad 1).
// Dense: in/out are vector lengths. Dropout: rate. MaxPool2d is 2x2 stride 2.
// Softmax may only appear last and marks the classifier head.
struct LayerSpec {
  LayerKind kind = LayerKind::Relu;
  std::size_t in = 0;
  std::size_t out = 0;
  double rate = 0.0;

  bool operator==(const LayerSpec&) const = default;
};

enum class Mode { Train, Eval };

struct ParamTensor {
  std::string name;
  std::size_t offset = 0;
  std::vector<std::size_t> shape;
  std::size_t size() const { return shape_size(shape); }
};

// Activations recorded during a forward pass; consumed by backward().
template <typename T>
struct Trace {
  std::vector<std::vector<T>> inputs;       // input of each layer
  std::vector<std::vector<T>> aux;          // dropout masks / pooling argmax (as T)
  std::vector<T> logits;
  bool recorded = false;
};

// Minimal sequential network with a flat parameter vector. Forward is const:
// a trained network can be shared read-only between threads.
template <typename T>
class Network {
 public:
  Network() = default;

  Network(std::vector<LayerSpec> layers, std::vector<std::size_t> input_shape)
      : layers_(std::move(layers)), input_shape_(std::move(input_shape)) {
    build();
  }

  const std::vector<LayerSpec>& layers() const { return layers_; }
  const std::vector<std::size_t>& input_shape() const { return input_shape_; }
  // Output shape of every layer, in order.
  const std::vector<std::vector<std::size_t>>& output_shapes() const { return shapes_; }
  const std::vector<ParamTensor>& param_tensors() const { return tensors_; }
  std::size_t parameter_count() const { return params_.size(); }
  std::size_t num_classes() const { return shapes_.empty() ? 0 : shape_size(shapes_.back()); }

  std::vector<T>& params() { return params_; }
  const std::vector<T>& params() const { return params_; }

  // Kaiming-uniform weights (bound sqrt(6 / fan_in)), zero biases.
  void init(std::uint64_t seed) {
    Rng rng(seed);
    std::fill(params_.begin(), params_.end(), T{});
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& s = layers_[l];
      if (s.kind != LayerKind::Conv2d && s.kind != LayerKind::Dense) continue;
      const double fan_in = s.kind == LayerKind::Conv2d ? static_cast<double>(s.in * 9)
                                                        : static_cast<double>(s.in);
      const double bound = std::sqrt(6.0 / fan_in);
      const ParamTensor& w = tensors_[weight_index_[l]];
      for (std::size_t i = 0; i < w.size(); ++i) {
        params_[w.offset + i] = static_cast<T>(rng.uniform(-bound, bound));
      }
    }
  }

  // Runs the network up to (not including) the softmax head. In Train mode
  // dropout masks are drawn from dropout_seed; Eval mode consumes no
  // randomness. When record is false only logits are kept.
  Trace<T> forward(std::span<const T> input, Mode mode, std::uint64_t dropout_seed = 0,
                   bool record = true) const {
    if (input.size() != shape_size(input_shape_)) {
      throw ShapeError("network input has " + std::to_string(input.size()) + " values, expected " +
                       shape_string(input_shape_));
    }
    Trace<T> trace;
    if (record) {
      trace.inputs.resize(layers_.size());
      trace.aux.resize(layers_.size());
    }
    Rng rng(dropout_seed);
    std::vector<T> cur(input.begin(), input.end());
    std::vector<T> next, aux;
    std::vector<std::size_t> shape = input_shape_;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& s = layers_[l];
      if (s.kind == LayerKind::Softmax) break;
      aux.clear();
      next.assign(shape_size(shapes_[l]), T{});
      switch (s.kind) {
        case LayerKind::Conv2d: {
          const ConvDims d = conv_dims(l);
          const ParamTensor& w = tensors_[weight_index_[l]];
          const ParamTensor& b = tensors_[weight_index_[l] + 1];
          parallel::conv2d_forward(d, cur.data(), &params_[w.offset], &params_[b.offset], next.data());
          break;
        }
        case LayerKind::Dense: {
          const ParamTensor& w = tensors_[weight_index_[l]];
          const ParamTensor& b = tensors_[weight_index_[l] + 1];
          parallel::dense_forward(s.in, s.out, cur.data(), &params_[w.offset], &params_[b.offset],
                                  next.data());
          break;
        }
        case LayerKind::MaxPool2d: {
          const std::size_t c = shape[0], h = shape[1], w = shape[2];
          const std::size_t oh = h / 2, ow = w / 2;
          aux.assign(next.size(), T{});
          for (std::size_t ch = 0; ch < c; ++ch) {
            const T* src = cur.data() + ch * h * w;
            for (std::size_t y = 0; y < oh; ++y) {
              for (std::size_t x = 0; x < ow; ++x) {
                std::size_t best = (2 * y) * w + 2 * x;
                for (std::size_t dy = 0; dy < 2; ++dy) {
                  for (std::size_t dx = 0; dx < 2; ++dx) {
                    const std::size_t idx = (2 * y + dy) * w + 2 * x + dx;
                    if (src[idx] > src[best]) best = idx;
                  }
                }
                const std::size_t o = ch * oh * ow + y * ow + x;
                next[o] = src[best];
                aux[o] = static_cast<T>(ch * h * w + best);
              }
            }
          }
          break;
        }
        case LayerKind::Dropout: {
          if (mode == Mode::Eval || s.rate == 0.0) {
            next = cur;
            if (record) aux.assign(cur.size(), T{1});
          } else {
            // uniform() < rate, compared on the raw 53-bit draw.
            const T keep_scale = static_cast<T>(1.0 / (1.0 - s.rate));
            const auto cut = static_cast<std::uint64_t>(std::ceil(std::ldexp(s.rate, 53)));
            aux.resize(cur.size());
            for (std::size_t i = 0; i < cur.size(); ++i) {
              aux[i] = (rng.next_u64() >> 11) < cut ? T{} : keep_scale;
              next[i] = cur[i] * aux[i];
            }
          }
          break;
        }
        case LayerKind::Relu:
          for (std::size_t i = 0; i < cur.size(); ++i) next[i] = cur[i] > T{} ? cur[i] : T{};
          break;
        case LayerKind::Softmax:
          break;
      }
#ifndef NDEBUG
      for (const T& v : next) {
        if (!std::isfinite(v)) throw Error("non-finite activation after layer " + std::to_string(l));
      }
#endif
      if (record) {
        trace.inputs[l] = std::move(cur);
        trace.aux[l] = aux;
      }
      cur = std::move(next);
      next = {};
      shape = shapes_[l];
    }
    trace.logits = std::move(cur);
    trace.recorded = record;
    return trace;
  }

  // Accumulates parameter gradients for d(loss)/d(logits) = grad_logits.
  void backward(const Trace<T>& trace, std::span<const T> grad_logits, std::span<T> grads) const {
    if (!trace.recorded) throw Error("backward called without a recorded forward pass");
    if (grads.size() != params_.size()) throw ShapeError("gradient buffer does not match parameters");
    if (grad_logits.size() != trace.logits.size()) throw ShapeError("logit gradient has wrong length");
    std::vector<T> g(grad_logits.begin(), grad_logits.end());
    std::vector<T> g_prev;
    std::size_t last = layers_.size();
    if (last > 0 && layers_[last - 1].kind == LayerKind::Softmax) --last;
    for (std::size_t li = last; li-- > 0;) {
      const auto& s = layers_[li];
      const auto& in = trace.inputs[li];
      const bool need_input_grad = li > 0;
      g_prev.assign(in.size(), T{});
      switch (s.kind) {
        case LayerKind::Conv2d: {
          const ConvDims d = conv_dims(li);
          const ParamTensor& w = tensors_[weight_index_[li]];
          const ParamTensor& b = tensors_[weight_index_[li] + 1];
          parallel::conv2d_backward(d, in.data(), &params_[w.offset], g.data(), &grads[w.offset],
                                    &grads[b.offset], need_input_grad ? g_prev.data() : nullptr);
          break;
        }
        case LayerKind::Dense: {
          const ParamTensor& w = tensors_[weight_index_[li]];
          const ParamTensor& b = tensors_[weight_index_[li] + 1];
          parallel::dense_backward(s.in, s.out, in.data(), &params_[w.offset], g.data(), &grads[w.offset],
                                   &grads[b.offset], need_input_grad ? g_prev.data() : nullptr);
          break;
        }
        case LayerKind::MaxPool2d: {
          const auto& idx = trace.aux[li];
          for (std::size_t o = 0; o < g.size(); ++o) g_prev[static_cast<std::size_t>(idx[o])] += g[o];
          break;
        }
        case LayerKind::Dropout: {
          const auto& mask = trace.aux[li];
          for (std::size_t i = 0; i < g.size(); ++i) g_prev[i] = g[i] * mask[i];
          break;
        }
        case LayerKind::Relu:
          for (std::size_t i = 0; i < g.size(); ++i) g_prev[i] = in[i] > T{} ? g[i] : T{};
          break;
        case LayerKind::Softmax:
          break;
      }
      std::swap(g, g_prev);
    }
  }

 private:
  void build() {
    if (input_shape_.empty()) throw ShapeError("network input shape is empty");
    std::vector<std::size_t> shape = input_shape_;
    shapes_.clear();
    tensors_.clear();
    weight_index_.assign(layers_.size(), 0);
    std::size_t offset = 0;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& s = layers_[l];
      const std::string where = "layer " + std::to_string(l) + " (" + to_string(s.kind) + ")";
      switch (s.kind) {
        case LayerKind::Conv2d:
          if (shape.size() != 3 || shape[0] != s.in || s.out == 0) {
            throw ShapeError(where + ": expects " + std::to_string(s.in) + " channels, got " +
                             shape_string(shape));
          }
          weight_index_[l] = tensors_.size();
          tensors_.push_back({"layer" + std::to_string(l) + ".weight", offset, {s.out, s.in, 3, 3}});
          offset += s.out * s.in * 9;
          tensors_.push_back({"layer" + std::to_string(l) + ".bias", offset, {s.out}});
          offset += s.out;
          shape = {s.out, shape[1], shape[2]};
          break;
        case LayerKind::MaxPool2d:
          if (shape.size() != 3 || shape[1] < 2 || shape[2] < 2) {
            throw ShapeError(where + ": needs C x H x W with H, W >= 2, got " + shape_string(shape));
          }
          shape = {shape[0], shape[1] / 2, shape[2] / 2};
          break;
        case LayerKind::Dense:
          if (shape_size(shape) != s.in || s.out == 0) {
            throw ShapeError(where + ": expects " + std::to_string(s.in) + " inputs, got " +
                             shape_string(shape));
          }
          weight_index_[l] = tensors_.size();
          tensors_.push_back({"layer" + std::to_string(l) + ".weight", offset, {s.out, s.in}});
          offset += s.out * s.in;
          tensors_.push_back({"layer" + std::to_string(l) + ".bias", offset, {s.out}});
          offset += s.out;
          shape = {s.out};
          break;
        case LayerKind::Dropout:
          if (!(s.rate >= 0.0 && s.rate < 1.0)) throw ConfigError(where + ": rate must be in [0, 1)");
          break;
        case LayerKind::Relu:
          break;
        case LayerKind::Softmax:
          if (l + 1 != layers_.size()) throw ConfigError(where + ": softmax must be the last layer");
          if (shape_size(shape) < 2) throw ShapeError(where + ": softmax needs >= 2 classes");
          break;
      }
      shapes_.push_back(shape);
    }
    params_.assign(offset, T{});
  }

  ConvDims conv_dims(std::size_t l) const {
    const auto& in_shape = l == 0 ? input_shape_ : shapes_[l - 1];
    return {layers_[l].in, layers_[l].out, in_shape[1], in_shape[2]};
  }

  std::vector<LayerSpec> layers_;
  std::vector<std::size_t> input_shape_;
  std::vector<std::vector<std::size_t>> shapes_;
  std::vector<ParamTensor> tensors_;
  std::vector<std::size_t> weight_index_;
  std::vector<T> params_;
};

// Inverted dropout on a standalone tensor; eval mode is the identity.
template <typename T>
Tensor<T> dropout(const Tensor<T>& input, double rate, Mode mode, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ConfigError("dropout rate must be in [0, 1)");
  Tensor<T> out = input;
  out.grad.reset();
  if (mode == Mode::Eval || rate == 0.0) return out;
  const T scale = static_cast<T>(1.0 / (1.0 - rate));
  for (auto& v : out.data) v = rng.uniform() < rate ? T{} : v * scale;
  return out;
}

template <typename T>
struct SoftmaxXent {
  T loss{};
  std::vector<T> probs;
  // d(loss)/d(logits) = probs - onehot(target)
  std::vector<T> grad;
};

template <typename T>
std::vector<T> softmax(std::span<const T> logits) {
  const T peak = *std::max_element(logits.begin(), logits.end());
  std::vector<T> p(logits.size());
  T sum{};
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - peak);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

template <typename T>
SoftmaxXent<T> softmax_xent(std::span<const T> logits, std::size_t target) {
  if (logits.size() < 2) throw ShapeError("softmax_xent needs at least 2 classes");
  if (target >= logits.size()) throw ShapeError("softmax_xent: target class out of range");
  SoftmaxXent<T> r;
  const T peak = *std::max_element(logits.begin(), logits.end());
  T sum{};
  for (T v : logits) sum += std::exp(v - peak);
  const T log_sum = std::log(sum);
  r.probs.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) r.probs[i] = std::exp(logits[i] - peak - log_sum);
  r.loss = -(logits[target] - peak - log_sum);
  r.grad = r.probs;
  r.grad[target] -= T{1};
  return r;
}

}  // namespace pdspeech::nn

#endif  // PDSPEECH_NN_NETWORK_H_
