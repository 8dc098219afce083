// src/cnn.cc

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

#include "pdspeech/cnn.h"

#include <cmath>
#include <ostream>

#include "pdspeech/checkpoint.h"

namespace pdspeech {

void CnnConfig::validate() const {
  if (n_mels < 2 || n_frames < 2) throw ConfigError("cnn: input must be at least 2x2");
  if (channels.empty()) throw ConfigError("cnn: need at least one conv block");
  int h = n_mels, w = n_frames;
  for (int c : channels) {
    if (c <= 0) throw ConfigError("cnn: channel counts must be positive");
    if (h < 2 || w < 2) throw ConfigError("cnn: too many pooling stages for the input size");
    h /= 2;
    w /= 2;
  }
  for (int d : dense) {
    if (d <= 0) throw ConfigError("cnn: dense sizes must be positive");
  }
  if (!(conv_dropout >= 0.0 && conv_dropout < 1.0) || !(dense_dropout >= 0.0 && dense_dropout < 1.0)) {
    throw ConfigError("cnn: dropout rates must be in [0, 1)");
  }
  if (activation != "relu") throw ConfigError("cnn: unsupported activation '" + activation + "'");
  if (batch_size < 1) throw ConfigError("cnn: batch_size must be >= 1");
  if (epochs < 0 || finetune_epochs < 0) throw ConfigError("cnn: epoch counts must be >= 0");
  if (!(lr > 0.0) || !(finetune_lr_scale > 0.0)) throw ConfigError("cnn: learning rates must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
    throw ConfigError("cnn: invalid Adam constants");
  }
}

#define PDSPEECH_JSON_FIELD(name) j[#name] = c.name;
#define PDSPEECH_JSON_READ(name) c.name = j.value(#name, d.name);

void to_json(nlohmann::json& j, const CnnConfig& c) {
  PDSPEECH_JSON_FIELD(n_mels) PDSPEECH_JSON_FIELD(n_frames) PDSPEECH_JSON_FIELD(channels)
  PDSPEECH_JSON_FIELD(dense) PDSPEECH_JSON_FIELD(conv_dropout) PDSPEECH_JSON_FIELD(dense_dropout)
  PDSPEECH_JSON_FIELD(activation) PDSPEECH_JSON_FIELD(batch_size) PDSPEECH_JSON_FIELD(lr)
  PDSPEECH_JSON_FIELD(epochs) PDSPEECH_JSON_FIELD(beta1) PDSPEECH_JSON_FIELD(beta2)
  PDSPEECH_JSON_FIELD(epsilon) PDSPEECH_JSON_FIELD(finetune_lr_scale)
  PDSPEECH_JSON_FIELD(finetune_epochs) PDSPEECH_JSON_FIELD(freeze_conv)
}

void from_json(const nlohmann::json& j, CnnConfig& c) {
  const CnnConfig d;
  PDSPEECH_JSON_READ(n_mels) PDSPEECH_JSON_READ(n_frames) PDSPEECH_JSON_READ(channels)
  PDSPEECH_JSON_READ(dense) PDSPEECH_JSON_READ(conv_dropout) PDSPEECH_JSON_READ(dense_dropout)
  PDSPEECH_JSON_READ(activation) PDSPEECH_JSON_READ(batch_size) PDSPEECH_JSON_READ(lr)
  PDSPEECH_JSON_READ(epochs) PDSPEECH_JSON_READ(beta1) PDSPEECH_JSON_READ(beta2)
  PDSPEECH_JSON_READ(epsilon) PDSPEECH_JSON_READ(finetune_lr_scale)
  PDSPEECH_JSON_READ(finetune_epochs) PDSPEECH_JSON_READ(freeze_conv)
}

#undef PDSPEECH_JSON_FIELD
#undef PDSPEECH_JSON_READ

std::vector<nn::LayerSpec> cnn_layers(const CnnConfig& cfg) {
  cfg.validate();
  using nn::LayerKind;
  std::vector<nn::LayerSpec> layers;
  std::size_t in = 1;
  std::size_t h = static_cast<std::size_t>(cfg.n_mels), w = static_cast<std::size_t>(cfg.n_frames);
  for (int c : cfg.channels) {
    const std::size_t out = static_cast<std::size_t>(c);
    layers.push_back({LayerKind::Conv2d, in, out, 0.0});
    layers.push_back({LayerKind::Dropout, 0, 0, cfg.conv_dropout});
    layers.push_back({LayerKind::Relu, 0, 0, 0.0});
    layers.push_back({LayerKind::MaxPool2d, 0, 0, 0.0});
    in = out;
    h /= 2;
    w /= 2;
  }
  std::size_t flat = in * h * w;
  for (int d : cfg.dense) {
    layers.push_back({LayerKind::Dense, flat, static_cast<std::size_t>(d), 0.0});
    layers.push_back({LayerKind::Dropout, 0, 0, cfg.dense_dropout});
    layers.push_back({LayerKind::Relu, 0, 0, 0.0});
    flat = static_cast<std::size_t>(d);
  }
  layers.push_back({LayerKind::Dense, flat, 2, 0.0});
  layers.push_back({LayerKind::Softmax, 0, 0, 0.0});
  return layers;
}

PdCnn::PdCnn(const CnnConfig& cfg)
    : config(cfg),
      net(cnn_layers(cfg), {1, static_cast<std::size_t>(cfg.n_mels), static_cast<std::size_t>(cfg.n_frames)}) {}

namespace {

void check_input(const MatrixD& mel, const CnnConfig& cfg) {
  if (mel.rows() != static_cast<std::size_t>(cfg.n_mels) ||
      mel.cols() != static_cast<std::size_t>(cfg.n_frames)) {
    throw ShapeError("cnn input is " + std::to_string(mel.rows()) + "x" + std::to_string(mel.cols()) +
                     ", expected " + std::to_string(cfg.n_mels) + "x" + std::to_string(cfg.n_frames));
  }
}

std::vector<float> normalize(const MatrixD& mel, double mean, double std) {
  std::vector<float> x(mel.data().size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>((mel.data()[i] - mean) / std);
  return x;
}

std::size_t target_of(Label label) { return label == Label::PD ? kPdClass : 1 - kPdClass; }

void set_norm_stats(PdCnn& model, const std::vector<LabeledSpectrogram>& data) {
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (const auto& s : data) {
    for (double v : s.mel.data()) {
      sum += v;
      sq += v * v;
    }
    n += s.mel.data().size();
  }
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, sq / static_cast<double>(n) - mean * mean);
  model.norm_mean = mean;
  model.norm_std = var > 1e-24 ? std::sqrt(var) : 1.0;
}

void check_data(const std::vector<LabeledSpectrogram>& data, const CnnConfig& cfg) {
  bool pd = false, hc = false;
  for (const auto& s : data) {
    check_input(s.mel, cfg);
    (s.label == Label::PD ? pd : hc) = true;
  }
  if (!pd || !hc) throw Error("training data must contain both PD and HC segments");
}

std::vector<EpochLog> fit(PdCnn& model, const std::vector<LabeledSpectrogram>& data, double lr, int epochs,
                          bool freeze_conv, std::uint64_t seed) {
  const CnnConfig& cfg = model.config;
  std::vector<std::vector<float>> inputs;
  inputs.reserve(data.size());
  for (const auto& s : data) inputs.push_back(normalize(s.mel, model.norm_mean, model.norm_std));

  auto& net = model.net;
  nn::AdamState<float> adam({lr, cfg.beta1, cfg.beta2, cfg.epsilon}, net.parameter_count());
  std::vector<float> grads(net.parameter_count());
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng order_rng(derive_seed(seed, "order"));
  const std::uint64_t dropout_root = derive_seed(seed, "dropout");
  // Conv tensors come first in the flat vector; the first dense weight ends them.
  std::size_t frozen_end = 0;
  if (freeze_conv) {
    for (const auto& t : net.param_tensors()) {
      if (t.shape.size() == 2) {
        frozen_end = t.offset;
        break;
      }
    }
  }

  std::vector<EpochLog> log;
  std::uint64_t step = 0;
  const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    order_rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t end = std::min(order.size(), start + bs);
      std::fill(grads.begin(), grads.end(), 0.0f);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t idx = order[k];
        const auto trace = net.forward(inputs[idx], nn::Mode::Train, derive_seed(dropout_root, step++));
        const std::size_t target = target_of(data[idx].label);
        const auto xent = nn::softmax_xent<float>(trace.logits, target);
        loss_sum += xent.loss;
        const std::size_t guess = xent.probs[kPdClass] >= 0.5f ? kPdClass : 1 - kPdClass;
        if (guess == target) ++correct;
        net.backward(trace, xent.grad, grads);
      }
      const float scale = 1.0f / static_cast<float>(end - start);
      for (auto& g : grads) g *= scale;
      std::fill(grads.begin(), grads.begin() + static_cast<long>(frozen_end), 0.0f);
      nn::adam_step<float>(net.params(), grads, adam);
    }
    const double n = static_cast<double>(data.size());
    log.push_back({epoch, loss_sum / n, correct / n});
  }
  return log;
}

}  // namespace

std::vector<double> PdCnn::probabilities(const MatrixD& mel) const {
  check_input(mel, config);
  const auto x = normalize(mel, norm_mean, norm_std);
  const auto trace = net.forward(x, nn::Mode::Eval, 0, false);
  std::vector<double> logits(trace.logits.begin(), trace.logits.end());
  return nn::softmax<double>(logits);
}

double PdCnn::predict(const MatrixD& mel) const { return probabilities(mel)[kPdClass]; }

void write_training_log(std::ostream& os, const std::vector<EpochLog>& log) {
  for (const auto& e : log) {
    nlohmann::json j = {{"epoch", e.epoch}, {"mean_loss", e.mean_loss}, {"train_acc", e.train_acc}};
    os << j.dump() << '\n';
  }
}

TrainResult train_cnn(const std::vector<LabeledSpectrogram>& data, const CnnConfig& cfg,
                      std::uint64_t seed) {
  cfg.validate();
  check_data(data, cfg);
  TrainResult r;
  r.model = PdCnn(cfg);
  r.model.net.init(derive_seed(seed, "init"));
  set_norm_stats(r.model, data);
  r.log = fit(r.model, data, cfg.lr, cfg.epochs, false, seed);
  r.model.provenance.seed = seed;
  r.model.provenance.epochs = cfg.epochs;
  return r;
}

TrainResult finetune(const PdCnn& base, const std::vector<LabeledSpectrogram>& data, const CnnConfig& cfg,
                     std::uint64_t seed) {
  cfg.validate();
  if (architecture_hash(cfg) != architecture_hash(base.config)) {
    throw ArchitectureMismatchError("fine-tune config describes a different network than the base model");
  }
  check_data(data, cfg);
  TrainResult r;
  r.model = base;
  r.model.config = cfg;
  set_norm_stats(r.model, data);
  r.log = fit(r.model, data, cfg.lr * cfg.finetune_lr_scale, cfg.finetune_epochs, cfg.freeze_conv, seed);
  r.model.provenance.seed = seed;
  r.model.provenance.epochs = cfg.finetune_epochs;
  return r;
}

double cnn_predict(const PdCnn& model, const std::vector<MatrixD>& segments) {
  if (segments.empty()) throw Error("cnn_predict: utterance has no segments");
  double sum = 0.0;
  for (const auto& s : segments) sum += model.predict(s);
  return sum / static_cast<double>(segments.size());
}

}  // namespace pdspeech
