// include/pdspeech/basefeat.h

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

#ifndef PDSPEECH_BASEFEAT_H_
#define PDSPEECH_BASEFEAT_H_

#include <string>
#include <vector>

#include "pdspeech/dsp.h"
#include "pdspeech/segment.h"

namespace pdspeech {

inline constexpr std::size_t kDescriptorCount = 58;  // 12 MFCC + 12 d + 12 dd + 22 Bark
inline constexpr std::size_t kFunctionalCount = 4;   // mean, std, skewness, kurtosis
inline constexpr std::size_t kBaselineDim = kDescriptorCount * kFunctionalCount;

struct UtteranceFeatures {
  std::vector<double> vector;  // functional-major: all means, then stds, skews, kurts
  UtteranceRecord source;
};

// Names in vector order, e.g. "mfcc03-mean", "bark21-kurt".
std::vector<std::string> descriptor_names(const MfccConfig& cfg = {});

// Frame descriptors of one segment: rows = MFCC, delta, delta-delta, Bark.
MatrixD segment_descriptors(std::span<const double> samples, const MfccConfig& cfg = {});

// Per-segment descriptor matrices concatenated along time. Deltas never span
// two segments.
MatrixD descriptor_frames(const std::vector<TransitionSegment>& segments, const MfccConfig& cfg = {});

// Mean, population std, skewness m3/m2^1.5 and excess kurtosis m4/m2^2 - 3
// per row; skewness and kurtosis are 0 when m2 < 1e-12.
UtteranceFeatures functionals(const MatrixD& frames);

UtteranceFeatures utterance_features(const std::vector<TransitionSegment>& segments,
                                     const MfccConfig& cfg = {});

}  // namespace pdspeech

#endif  // PDSPEECH_BASEFEAT_H_
