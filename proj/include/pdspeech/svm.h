// include/pdspeech/svm.h

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

#ifndef PDSPEECH_SVM_H_
#define PDSPEECH_SVM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "pdspeech/corpus.h"

namespace pdspeech {

struct SvmConfig {
  double C = 10.0;
  double gamma = 1e-4;
  double tolerance = 1e-3;  // stop when the maximal KKT violation falls below this
  long max_iterations = 10000000;

  void validate() const;
  bool operator==(const SvmConfig&) const = default;
};

void to_json(nlohmann::json& j, const SvmConfig& c);
void from_json(const nlohmann::json& j, SvmConfig& c);

// RBF support vector machine. PD is the positive class (y = +1).
struct SvmModel {
  SvmConfig config;
  std::vector<double> mean;   // per-dimension standardization, from training data
  std::vector<double> scale;  // std, 1 where the training std is 0
  std::vector<std::vector<double>> support_vectors;  // standardized
  std::vector<double> coef;   // alpha_i * y_i
  double bias = 0.0;

  std::size_t dim() const { return mean.size(); }
};

struct SvmTrainInfo {
  long iterations = 0;
  double kkt_gap = 0.0;             // m(alpha) - M(alpha) at exit
  std::vector<double> objective;    // dual objective after every update
  std::vector<double> alpha;        // final dual variables, in input order
  bool converged = false;
};

struct SvmPrediction {
  double score = 0.0;  // decision value sum_i alpha_i y_i k(x_i, x) + b
  Label label = Label::HC;
};

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

SvmModel train_svm(const std::vector<std::vector<double>>& features, const std::vector<Label>& labels,
                   const SvmConfig& cfg = {}, SvmTrainInfo* info = nullptr);

SvmPrediction svm_predict(const SvmModel& model, std::span<const double> features);

// Posterior-like score in (0, 1) for ROC analysis: logistic of the decision
// value.
double svm_posterior(double decision);

void to_json(nlohmann::json& j, const SvmModel& m);
void from_json(const nlohmann::json& j, SvmModel& m);

}  // namespace pdspeech

#endif  // PDSPEECH_SVM_H_
