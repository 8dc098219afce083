// tests/synth_util.h

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

#ifndef PDSPEECH_TESTS_SYNTH_UTIL_H_
#define PDSPEECH_TESTS_SYNTH_UTIL_H_

#include <string>
#include <vector>

#include "pdspeech/eval.h"
#include "pdspeech/synth.h"

namespace pdspeech::testing {

// Prepared corpus for one synthetic language, built in memory.
inline PreparedCorpus synth_prepared(const SynthSpec& spec, const LanguageSpec& lang, std::uint64_t seed,
                                     const PipelineConfig& cfg) {
  PreparedCorpus c;
  c.language = lang.name;
  std::vector<AudioClip> clips;
  for (Label l : {Label::PD, Label::HC}) {
    const int n = l == Label::PD ? lang.pd_speakers : lang.hc_speakers;
    for (int i = 0; i < n; ++i) {
      const SpeakerVoice v = make_speaker(spec, lang, l, i, seed);
      for (int u = 0; u < spec.utterances_per_speaker; ++u) {
        SynthClip s = synth_clip(spec, lang, v, u, seed);
        clips.push_back({std::move(s.samples), kPipelineSampleRate, s.record});
      }
    }
  }
  c.utterances.resize(clips.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < static_cast<long>(clips.size()); ++i) c.utterances[i] = prepare_utterance(clips[i], cfg);
  for (const auto& u : c.utterances) c.segments_skipped += u.segments_skipped;
  return c;
}

// Copy of a language with a new name and speaker counts.
inline LanguageSpec variant(LanguageSpec lang, const std::string& name, int per_class) {
  lang.name = name;
  lang.pd_speakers = lang.hc_speakers = per_class;
  return lang;
}

}  // namespace pdspeech::testing

#endif  // PDSPEECH_TESTS_SYNTH_UTIL_H_
