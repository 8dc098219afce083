// src/basefeat.cc

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

#include "pdspeech/basefeat.h"

#include <cmath>
#include <cstdio>

namespace pdspeech {

std::vector<std::string> descriptor_names(const MfccConfig& cfg) {
  std::vector<std::string> rows;
  char buf[32];
  for (const char* prefix : {"mfcc", "dmfcc", "ddmfcc"}) {
    for (int k = 1; k <= cfg.n_coeffs; ++k) {
      std::snprintf(buf, sizeof(buf), "%s%02d", prefix, k);
      rows.emplace_back(buf);
    }
  }
  for (int b = 0; b < cfg.n_bark_bands; ++b) {
    std::snprintf(buf, sizeof(buf), "bark%02d", b);
    rows.emplace_back(buf);
  }
  std::vector<std::string> names;
  for (const char* fn : {"mean", "std", "skew", "kurt"}) {
    for (const auto& r : rows) names.push_back(r + "-" + fn);
  }
  return names;
}

MatrixD segment_descriptors(std::span<const double> samples, const MfccConfig& cfg) {
  const MatrixD c = mfcc(samples, cfg);
  const MatrixD d1 = deltas(c, cfg.delta_window);
  const MatrixD d2 = deltas(d1, cfg.delta_window);
  const MatrixD bark = bark_energies(samples, cfg);
  MatrixD out(c.rows() * 3 + bark.rows(), c.cols());
  std::size_t r = 0;
  for (const MatrixD* m : {&c, &d1, &d2, &bark}) {
    for (std::size_t i = 0; i < m->rows(); ++i, ++r) {
      for (std::size_t t = 0; t < m->cols(); ++t) out(r, t) = (*m)(i, t);
    }
  }
  return out;
}

MatrixD descriptor_frames(const std::vector<TransitionSegment>& segments, const MfccConfig& cfg) {
  if (segments.empty()) throw Error("no transitions");
  std::vector<MatrixD> parts;
  std::size_t total = 0;
  for (const auto& s : segments) {
    parts.push_back(segment_descriptors(s.samples, cfg));
    total += parts.back().cols();
  }
  MatrixD out(parts.front().rows(), total);
  std::size_t col = 0;
  for (const auto& p : parts) {
    for (std::size_t r = 0; r < p.rows(); ++r) {
      for (std::size_t t = 0; t < p.cols(); ++t) out(r, col + t) = p(r, t);
    }
    col += p.cols();
  }
  return out;
}

UtteranceFeatures functionals(const MatrixD& frames) {
  if (frames.cols() == 0) throw ShapeError("functionals: no frames");
  const std::size_t rows = frames.rows();
  const double n = static_cast<double>(frames.cols());
  UtteranceFeatures f;
  f.vector.assign(rows * kFunctionalCount, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = frames.row(r);
    double mean = 0.0;
    for (std::size_t t = 0; t < frames.cols(); ++t) mean += x[t];
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (std::size_t t = 0; t < frames.cols(); ++t) {
      const double d = x[t] - mean;
      const double d2 = d * d;
      m2 += d2;
      m3 += d2 * d;
      m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    f.vector[r] = mean;
    f.vector[rows + r] = std::sqrt(m2);
    if (m2 >= 1e-12) {
      f.vector[2 * rows + r] = m3 / std::pow(m2, 1.5);
      f.vector[3 * rows + r] = m4 / (m2 * m2) - 3.0;
    }
  }
  return f;
}

UtteranceFeatures utterance_features(const std::vector<TransitionSegment>& segments,
                                     const MfccConfig& cfg) {
  UtteranceFeatures f = functionals(descriptor_frames(segments, cfg));
  f.source = segments.front().source;
  return f;
}

}  // namespace pdspeech
