// include/pdspeech/segment.h

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

#ifndef PDSPEECH_SEGMENT_H_
#define PDSPEECH_SEGMENT_H_

#include <cstddef>
#include <vector>

#include "json.hpp"
#include "pdspeech/corpus.h"
#include "pdspeech/dsp.h"

namespace pdspeech {

inline constexpr std::size_t kTransitionSamples = 2560;  // 160 ms at 16 kHz

struct SegmentConfig {
  // Runs shorter than this many frames are treated as voicing-flag chatter.
  int min_run = 3;
  // Samples kept on each side of a boundary.
  int half_width = static_cast<int>(kTransitionSamples / 2);

  void validate() const;
  bool operator==(const SegmentConfig&) const = default;
};

void to_json(nlohmann::json& j, const SegmentConfig& c);
void from_json(const nlohmann::json& j, SegmentConfig& c);

struct Boundary {
  std::size_t sample = 0;
  TransitionKind kind = TransitionKind::Onset;
  bool operator==(const Boundary&) const = default;
};

struct TransitionSegment {
  std::vector<double> samples;
  TransitionKind kind = TransitionKind::Onset;
  std::size_t boundary_sample = 0;  // index into the source clip; segment midpoint
  UtteranceRecord source;
};

struct ExtractResult {
  std::vector<TransitionSegment> segments;
  std::size_t skipped = 0;  // boundaries too close to a clip edge
};

// Voicing flips between stable runs. A run of at least min_run frames with
// the opposite state to the current stable state opens a new boundary at
// its first frame's anchor, so onsets and offsets always alternate.
std::vector<Boundary> find_boundaries(const VoicingTrack& track, int min_run = 3);

ExtractResult extract_transitions(const AudioClip& clip, const std::vector<Boundary>& boundaries,
                                  int half_width = static_cast<int>(kTransitionSamples / 2));

// voicing -> find_boundaries -> extract_transitions.
ExtractResult segment_clip(const AudioClip& clip, const VoicingConfig& vcfg, const SegmentConfig& scfg);

}  // namespace pdspeech

#endif  // PDSPEECH_SEGMENT_H_
