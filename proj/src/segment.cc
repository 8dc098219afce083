// src/segment.cc

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

#include "pdspeech/segment.h"

namespace pdspeech {

void SegmentConfig::validate() const {
  if (min_run < 1) throw ConfigError("segment: min_run must be >= 1");
  if (half_width < 1) throw ConfigError("segment: half_width must be >= 1");
}

void to_json(nlohmann::json& j, const SegmentConfig& c) {
  j = {{"min_run", c.min_run}, {"half_width", c.half_width}};
}

void from_json(const nlohmann::json& j, SegmentConfig& c) {
  const SegmentConfig d;
  c.min_run = j.value("min_run", d.min_run);
  c.half_width = j.value("half_width", d.half_width);
}

std::vector<Boundary> find_boundaries(const VoicingTrack& track, int min_run) {
  if (min_run < 1) throw ConfigError("find_boundaries: min_run must be >= 1");
  std::vector<Boundary> out;
  const auto& f = track.flags;
  const std::size_t need = static_cast<std::size_t>(min_run);
  bool have_state = false;
  bool state = false;
  std::size_t i = 0;
  while (i < f.size()) {
    std::size_t j = i;
    while (j < f.size() && f[j] == f[i]) ++j;
    const std::size_t len = j - i;
    if (len >= need) {
      if (have_state && f[i] != state) {
        out.push_back({track.anchor(i), f[i] ? TransitionKind::Onset : TransitionKind::Offset});
      }
      state = f[i];
      have_state = true;
    }
    i = j;
  }
  return out;
}

ExtractResult extract_transitions(const AudioClip& clip, const std::vector<Boundary>& boundaries,
                                  int half_width) {
  if (half_width < 1) throw ConfigError("extract_transitions: half_width must be >= 1");
  const std::size_t half = static_cast<std::size_t>(half_width);
  ExtractResult result;
  for (const auto& b : boundaries) {
    if (b.sample < half || b.sample + half > clip.samples.size()) {
      ++result.skipped;
      continue;
    }
    TransitionSegment seg;
    seg.samples.assign(clip.samples.begin() + static_cast<long>(b.sample - half),
                       clip.samples.begin() + static_cast<long>(b.sample + half));
    seg.kind = b.kind;
    seg.boundary_sample = b.sample;
    seg.source = clip.source;
    result.segments.push_back(std::move(seg));
  }
  return result;
}

ExtractResult segment_clip(const AudioClip& clip, const VoicingConfig& vcfg, const SegmentConfig& scfg) {
  scfg.validate();
  const VoicingTrack track = voicing(clip.samples, vcfg);
  return extract_transitions(clip, find_boundaries(track, scfg.min_run), scfg.half_width);
}

}  // namespace pdspeech
