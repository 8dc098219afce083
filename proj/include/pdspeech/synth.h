// include/pdspeech/synth.h

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

#ifndef PDSPEECH_SYNTH_H_
#define PDSPEECH_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdspeech/corpus.h"

namespace pdspeech {

// Articulatory profile at the two ends of the HC..PD continuum. A speaker's
// profile is a linear blend between them, positioned by severity times the
// language's contrast.
struct ClassProfile {
  double onset_ramp_ms = 6.0;    // voice fade-in overlapping the fricative fade-out
  double offset_ramp_ms = 6.0;   // voice fade-out overlapping the next fricative
  double aspiration = 0.04;      // breath noise RMS relative to the voiced RMS
  double f0_range_st = 3.0;      // peak-to-peak intonation excursion, semitones
  double jitter = 0.004;         // cycle-to-cycle relative period perturbation
};

struct LanguageSpec {
  std::string name;
  int pd_speakers = 10;
  int hc_speakers = 10;
  double contrast = 1.0;          // in (0, 1]; scales the PD/HC separation
  double f0_male_hz = 120.0;
  double f0_female_hz = 210.0;
  double formant_scale = 1.0;
  double fricative_hz = 4500.0;
  double fricative_level = 0.8;   // fricative RMS relative to vowel RMS
  double voiced_ms_min = 140.0;
  double voiced_ms_max = 260.0;
  double unvoiced_ms_min = 90.0;
  double unvoiced_ms_max = 170.0;
  double tilt = 0.3;              // one-pole lowpass coefficient on the glottal source
};

struct SynthSpec {
  int utterances_per_speaker = 5;
  double duration_min_s = 2.0;
  double duration_max_s = 6.0;
  std::vector<std::string> tasks = {"pataka", "read-text", "monologue"};
  ClassProfile hc;
  ClassProfile pd{45.0, 30.0, 0.35, 0.8, 0.012};
  // HC speakers draw severity from [0, hc_severity_max]; PD speakers from
  // [pd_severity_min, pd_severity_max]. pd_severity_min > hc_severity_max keeps
  // every PD speaker's ramps strictly longer than every HC speaker's.
  double hc_severity_max = 0.2;
  double pd_severity_min = 0.35;
  double pd_severity_max = 1.0;
  // Per-syllable multiplicative spread (log-normal sigma) of ramp lengths.
  double ramp_spread = 0.3;
  std::vector<LanguageSpec> languages;

  // Throws ConfigError when counts or ranges are invalid.
  void validate() const;
  std::size_t utterance_count() const;
};

void to_json(nlohmann::json& j, const SynthSpec& s);
void from_json(const nlohmann::json& j, SynthSpec& s);
SynthSpec load_synth_spec(const std::filesystem::path& path);
// Three languages with decreasing contrast; used by the CLI when no spec file
// is given.
SynthSpec default_synth_spec();

struct PlantedBoundary {
  std::size_t sample = 0;
  TransitionKind kind = TransitionKind::Onset;
  double ramp_ms = 0.0;
};

// Speaker-level parameters resolved from a SynthSpec.
struct SpeakerVoice {
  SpeakerMeta meta;
  double severity = 0.0;
  ClassProfile profile;
  double f0_hz = 120.0;
  double formant_scale = 1.0;
  double loudness = 1.0;
};

struct SynthUtterance {
  std::vector<double> samples;
  std::vector<PlantedBoundary> boundaries;
};

SpeakerVoice make_speaker(const SynthSpec& spec, const LanguageSpec& lang, Label label,
                          int index, std::uint64_t seed);

SynthUtterance synth_utterance(const SynthSpec& spec, const LanguageSpec& lang,
                               const SpeakerVoice& voice, double duration_s,
                               std::uint64_t seed);

struct SynthClip {
  UtteranceRecord record;  // path relative to the corpus root: wav/<lang>/<speaker>_u<k>.wav
  std::vector<double> samples;
  std::vector<PlantedBoundary> boundaries;
};

// Utterance utt of one speaker, exactly as synth_corpus writes it.
SynthClip synth_clip(const SynthSpec& spec, const LanguageSpec& lang, const SpeakerVoice& voice, int utt,
                     std::uint64_t seed);

struct SynthResult {
  std::filesystem::path manifest;
  std::filesystem::path planted;  // CSV: path,boundary_sample,kind
  std::vector<UtteranceRecord> records;
  std::vector<std::vector<PlantedBoundary>> boundaries;  // parallel to records
};

// Writes <out_dir>/manifest.csv, <out_dir>/planted_boundaries.csv and the
// WAV files under <out_dir>/wav/<language>/. Output bytes depend only on
// (spec, seed).
SynthResult synth_corpus(const SynthSpec& spec, std::uint64_t seed,
                         const std::filesystem::path& out_dir);

}  // namespace pdspeech

#endif  // PDSPEECH_SYNTH_H_
