// src/svm.cc

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

#include "pdspeech/svm.h"

#include <cmath>
#include <limits>

namespace pdspeech {

void SvmConfig::validate() const {
  if (!(C > 0.0)) throw ConfigError("svm: C must be positive");
  if (!(gamma > 0.0)) throw ConfigError("svm: gamma must be positive");
  if (!(tolerance > 0.0)) throw ConfigError("svm: tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("svm: max_iterations must be >= 1");
}

void to_json(nlohmann::json& j, const SvmConfig& c) {
  j = {{"C", c.C}, {"gamma", c.gamma}, {"tolerance", c.tolerance}, {"max_iterations", c.max_iterations}};
}

void from_json(const nlohmann::json& j, SvmConfig& c) {
  const SvmConfig d;
  c.C = j.value("C", d.C);
  c.gamma = j.value("gamma", d.gamma);
  c.tolerance = j.value("tolerance", d.tolerance);
  c.max_iterations = j.value("max_iterations", d.max_iterations);
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

namespace {

std::vector<double> standardize(std::span<const double> x, const SvmModel& m) {
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - m.mean[i]) / m.scale[i];
  return z;
}

}  // namespace

// SMO with second-order working set selection (WSS2), following the
// LIBSVM solver's update and clipping rules.
SvmModel train_svm(const std::vector<std::vector<double>>& features, const std::vector<Label>& labels,
                   const SvmConfig& cfg, SvmTrainInfo* info) {
  cfg.validate();
  const std::size_t n = features.size();
  if (n != labels.size()) throw ShapeError("train_svm: feature and label counts differ");
  if (n == 0) throw Error("train_svm: no training data");
  const std::size_t dim = features[0].size();
  bool pd = false, hc = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (features[i].size() != dim) throw ShapeError("train_svm: feature vectors differ in length");
    for (double v : features[i]) {
      if (!std::isfinite(v)) throw Error("train_svm: non-finite feature value");
    }
    (labels[i] == Label::PD ? pd : hc) = true;
  }
  if (!pd || !hc) throw Error("train_svm: training data must contain both PD and HC");

  SvmModel model;
  model.config = cfg;
  model.mean.assign(dim, 0.0);
  model.scale.assign(dim, 0.0);
  for (const auto& x : features) {
    for (std::size_t d = 0; d < dim; ++d) model.mean[d] += x[d];
  }
  for (auto& m : model.mean) m /= static_cast<double>(n);
  for (const auto& x : features) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double e = x[d] - model.mean[d];
      model.scale[d] += e * e;
    }
  }
  for (auto& s : model.scale) {
    s = std::sqrt(s / static_cast<double>(n));
    if (!(s > 0.0)) s = 1.0;
  }

  std::vector<std::vector<double>> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = standardize(features[i], model);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == Label::PD ? 1.0 : -1.0;

  std::vector<double> K(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    K[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) K[i * n + j] = K[j * n + i] = rbf_kernel(z[i], z[j], cfg.gamma);
  }

  const double C = cfg.C;
  const double tau = 1e-12;
  std::vector<double> alpha(n, 0.0), G(n, -1.0);
  auto in_up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0); };
  auto in_low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C); };
  auto objective = [&] {
    double f = 0.0;
    for (std::size_t t = 0; t < n; ++t) f += alpha[t] * (G[t] - 1.0);
    return 0.5 * f;
  };

  long iter = 0;
  double gap = 0.0;
  bool converged = false;
  for (; iter < cfg.max_iterations; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * G[t] >= gmax) {
        gmax = -y[t] * G[t];
        i = t;
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      gmax2 = std::max(gmax2, y[t] * G[t]);
      if (i == n) continue;
      const double b = gmax + y[t] * G[t];
      if (b > 0.0) {
        double a = K[i * n + i] + K[t * n + t] - 2.0 * K[i * n + t];
        if (a <= 0.0) a = tau;
        const double obj = -(b * b) / a;
        if (obj <= best) {
          best = obj;
          j = t;
        }
      }
    }
    gap = gmax + gmax2;
    if (i == n || j == n || gap < cfg.tolerance) {
      converged = true;
      break;
    }

    const double old_i = alpha[i], old_j = alpha[j];
    double quad = K[i * n + i] + K[j * n + j] - 2.0 * K[i * n + j];
    if (quad <= 0.0) quad = tau;
    if (y[i] != y[j]) {
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      const double delta = (G[i] - G[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) {
      G[t] += y[t] * (y[i] * K[t * n + i] * di + y[j] * K[t * n + j] * dj);
    }
    if (info) info->objective.push_back(objective());
  }

  // Bias from free support vectors, or the midpoint of the feasible range.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * G[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  model.bias = -rho;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) {
      model.support_vectors.push_back(z[t]);
      model.coef.push_back(alpha[t] * y[t]);
    }
  }
  if (info) {
    info->iterations = iter;
    info->kkt_gap = gap;
    info->alpha = alpha;
    info->converged = converged;
  }
  return model;
}

SvmPrediction svm_predict(const SvmModel& model, std::span<const double> features) {
  if (features.size() != model.dim()) {
    throw ShapeError("svm_predict: feature length " + std::to_string(features.size()) + ", model expects " +
                     std::to_string(model.dim()));
  }
  const auto z = standardize(features, model);
  double s = model.bias;
  for (std::size_t k = 0; k < model.support_vectors.size(); ++k) {
    s += model.coef[k] * rbf_kernel(model.support_vectors[k], z, model.config.gamma);
  }
  return {s, s >= 0.0 ? Label::PD : Label::HC};
}

double svm_posterior(double decision) { return 1.0 / (1.0 + std::exp(-decision)); }

void to_json(nlohmann::json& j, const SvmModel& m) {
  j = {{"config", m.config}, {"mean", m.mean},       {"scale", m.scale},
       {"bias", m.bias},     {"coef", m.coef},       {"support_vectors", m.support_vectors}};
}

void from_json(const nlohmann::json& j, SvmModel& m) {
  m.config = j.at("config").get<SvmConfig>();
  m.mean = j.at("mean").get<std::vector<double>>();
  m.scale = j.at("scale").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  m.coef = j.at("coef").get<std::vector<double>>();
  m.support_vectors = j.at("support_vectors").get<std::vector<std::vector<double>>>();
  if (m.scale.size() != m.mean.size() || m.coef.size() != m.support_vectors.size()) {
    throw ShapeError("svm model JSON has inconsistent sizes");
  }
}

}  // namespace pdspeech
