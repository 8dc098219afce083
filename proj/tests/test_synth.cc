// tests/test_synth.cc

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

#include <filesystem>
#include <map>

#include "doctest.h"
#include "pdspeech/synth.h"
#include "test_util.h"

using namespace pdspeech;
using pdspeech::testing::TempDir;

namespace {

SynthSpec small_spec() {
  SynthSpec s = default_synth_spec();
  s.languages.resize(2);
  for (auto& l : s.languages) l.pd_speakers = l.hc_speakers = 10;
  s.utterances_per_speaker = 5;
  s.duration_min_s = 1.0;
  s.duration_max_s = 1.2;
  return s;
}

}  // namespace

TEST_CASE("two languages of 10 + 10 speakers with 5 utterances give 200 files") {
  TempDir dir("synth");
  const SynthSpec spec = small_spec();
  const SynthResult r = synth_corpus(spec, 3, dir.path());
  CHECK(r.records.size() == 200);
  CHECK(spec.utterance_count() == 200);
  std::size_t wavs = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir.path() / "wav")) {
    if (e.path().extension() == ".wav") ++wavs;
  }
  CHECK(wavs == 200);
  CHECK(std::filesystem::exists(r.manifest));
  CHECK(load_manifest(r.manifest) == r.records);
  for (const auto& rec : r.records) {
    const AudioClip c = load_audio(rec);
    CHECK(c.sample_rate == 16000);
    double peak = 0;
    for (double v : c.samples) peak = std::max(peak, std::abs(v));
    CHECK(peak <= 1.0);
  }
}

TEST_CASE("synthesis is a pure function of spec and seed") {
  TempDir a("synth"), b("synth");
  SynthSpec spec = small_spec();
  for (auto& l : spec.languages) l.pd_speakers = l.hc_speakers = 2;
  synth_corpus(spec, 9, a.path());
  synth_corpus(spec, 9, b.path());
  std::size_t files = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(a.path())) {
    if (!e.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(e.path(), a.path());
    CHECK(pdspeech::testing::read_file(e.path()) == pdspeech::testing::read_file(b.path() / rel));
    ++files;
  }
  CHECK(files == 2 * 4 * 5 + 2);
}

TEST_CASE("PD onset ramps are strictly longer than HC ramps") {
  const SynthSpec spec = default_synth_spec();
  for (const auto& lang : spec.languages) {
    double min_pd = 1e9, max_hc = 0;
    for (int i = 0; i < 25; ++i) {
      min_pd = std::min(min_pd, make_speaker(spec, lang, Label::PD, i, 4).profile.onset_ramp_ms);
      max_hc = std::max(max_hc, make_speaker(spec, lang, Label::HC, i, 4).profile.onset_ramp_ms);
    }
    CHECK(min_pd > max_hc);
  }
  // Same seed, same index: the PD utterance carries the longer planted onsets.
  const auto& lang = spec.languages[0];
  const SpeakerVoice pd = make_speaker(spec, lang, Label::PD, 0, 8);
  const SpeakerVoice hc = make_speaker(spec, lang, Label::HC, 0, 8);
  auto mean_onset = [](const SynthUtterance& u) {
    double s = 0;
    int n = 0;
    for (const auto& b : u.boundaries) {
      if (b.kind == TransitionKind::Onset) {
        s += b.ramp_ms;
        ++n;
      }
    }
    return s / n;
  };
  CHECK(mean_onset(synth_utterance(spec, lang, pd, 3.0, 8)) > mean_onset(synth_utterance(spec, lang, hc, 3.0, 8)));
}

TEST_CASE("speaker census is balanced by sex") {
  SynthSpec spec = default_synth_spec();
  std::map<std::pair<Label, Sex>, int> census;
  for (Label l : {Label::PD, Label::HC}) {
    for (int i = 0; i < 50; ++i) ++census[{l, make_speaker(spec, spec.languages[0], l, i, 1).meta.sex}];
  }
  CHECK(census[{Label::PD, Sex::M}] == 25);
  CHECK(census[{Label::PD, Sex::F}] == 25);
  CHECK(census[{Label::HC, Sex::M}] == 25);
  CHECK(census[{Label::HC, Sex::F}] == 25);
}

TEST_CASE("synth spec JSON round trip and validation") {
  const SynthSpec spec = default_synth_spec();
  const nlohmann::json j = spec;
  const SynthSpec back = j.get<SynthSpec>();
  CHECK(nlohmann::json(back) == j);
  nlohmann::json bad = j;
  bad["bogus"] = 1;
  CHECK_THROWS_AS(bad.get<SynthSpec>(), ConfigError);
  SynthSpec s = spec;
  s.pd_severity_min = 0.1;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = spec;
  s.languages[1].name = s.languages[0].name;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}
