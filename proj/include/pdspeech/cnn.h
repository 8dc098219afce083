// include/pdspeech/cnn.h

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

#ifndef PDSPEECH_CNN_H_
#define PDSPEECH_CNN_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdspeech/corpus.h"
#include "pdspeech/dsp.h"
#include "pdspeech/nn/adam.h"
#include "pdspeech/nn/network.h"

namespace pdspeech {

// Output index of the PD class in the two-way softmax.
inline constexpr std::size_t kPdClass = 1;

struct CnnConfig {
  // Architecture.
  int n_mels = 80;
  int n_frames = 41;
  std::vector<int> channels = {4, 8, 16, 32};
  std::vector<int> dense = {128, 64};
  double conv_dropout = 0.25;
  double dense_dropout = 0.5;
  std::string activation = "relu";
  // Training.
  int batch_size = 64;
  double lr = 1e-3;
  int epochs = 50;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Fine-tuning.
  double finetune_lr_scale = 0.1;
  int finetune_epochs = 50;
  bool freeze_conv = false;  // fine-tuning only: keep conv weights fixed

  void validate() const;
  bool operator==(const CnnConfig&) const = default;
};

void to_json(nlohmann::json& j, const CnnConfig& c);
void from_json(const nlohmann::json& j, CnnConfig& c);

// Layer stack for the configured architecture: per conv block
// Conv -> Dropout -> ReLU -> MaxPool, then Dense -> Dropout -> ReLU per
// hidden layer, then Dense(., 2) -> Softmax.
std::vector<nn::LayerSpec> cnn_layers(const CnnConfig& cfg);

struct Provenance {
  std::string base_language;
  std::string target_language;
  std::uint64_t seed = 0;
  int epochs = 0;
  bool operator==(const Provenance&) const = default;
};

struct PdCnn {
  CnnConfig config;
  nn::Network<float> net;
  double norm_mean = 0.0;
  double norm_std = 1.0;
  Provenance provenance;

  PdCnn() = default;
  explicit PdCnn(const CnnConfig& cfg);

  // PD probability of one spectrogram, eval mode.
  double predict(const MatrixD& mel) const;
  // Both class probabilities, eval mode.
  std::vector<double> probabilities(const MatrixD& mel) const;
};

struct LabeledSpectrogram {
  MatrixD mel;  // n_mels x n_frames log-Mel values
  Label label = Label::HC;
};

struct EpochLog {
  int epoch = 0;
  double mean_loss = 0.0;
  double train_acc = 0.0;
};

struct TrainResult {
  PdCnn model;
  std::vector<EpochLog> log;
};

// One JSON object per line: {"epoch", "mean_loss", "train_acc"}.
void write_training_log(std::ostream& os, const std::vector<EpochLog>& log);

TrainResult train_cnn(const std::vector<LabeledSpectrogram>& data, const CnnConfig& cfg,
                      std::uint64_t seed);

// Continues training every layer of base on the target data at
// lr * finetune_lr_scale for finetune_epochs. Normalization statistics are
// recomputed on the target data. Throws ArchitectureMismatchError when cfg
// describes another network than base.
TrainResult finetune(const PdCnn& base, const std::vector<LabeledSpectrogram>& data,
                     const CnnConfig& cfg, std::uint64_t seed);

// Mean PD probability over the segments of one utterance.
double cnn_predict(const PdCnn& model, const std::vector<MatrixD>& segments);

}  // namespace pdspeech

#endif  // PDSPEECH_CNN_H_
