// tests/test_segment.cc

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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "pdspeech/segment.h"
#include "pdspeech/synth.h"
#include "test_util.h"

using namespace pdspeech;

namespace {

VoicingTrack track_of(const std::vector<std::pair<bool, int>>& runs) {
  VoicingTrack t;
  t.frame_len = 512;
  t.frame_hop = 160;
  for (auto [v, n] : runs) t.flags.insert(t.flags.end(), static_cast<std::size_t>(n), v);
  t.f0.assign(t.flags.size(), std::nullopt);
  return t;
}

AudioClip clip_of(std::vector<double> x) {
  AudioClip c;
  c.samples = std::move(x);
  return c;
}

std::vector<double> noise_saw_noise() {
  auto x = pdspeech::testing::white_noise(8000, 17, 0.3);
  const auto saw = pdspeech::testing::sawtooth(140.0, 8000, 16000, 0.5);
  const auto tail = pdspeech::testing::white_noise(8000, 18, 0.3);
  x.insert(x.end(), saw.begin(), saw.end());
  x.insert(x.end(), tail.begin(), tail.end());
  return x;
}

}  // namespace

TEST_CASE("single flip gives one onset at the first voiced frame") {
  const auto b = find_boundaries(track_of({{false, 10}, {true, 10}}));
  REQUIRE(b.size() == 1);
  CHECK(b[0].kind == TransitionKind::Onset);
  CHECK(b[0].sample == 1600);
}

TEST_CASE("short voiced run is chatter") {
  CHECK(find_boundaries(track_of({{false, 10}, {true, 1}, {false, 10}})).empty());
  CHECK(find_boundaries(track_of({{false, 10}, {true, 2}, {false, 10}})).empty());
  CHECK(find_boundaries(track_of({{false, 10}, {true, 3}, {false, 10}})).size() == 2);
}

TEST_CASE("boundaries alternate") {
  const auto b = find_boundaries(
      track_of({{true, 5}, {false, 4}, {true, 1}, {false, 2}, {true, 6}, {false, 3}, {true, 3}, {false, 1}}));
  REQUIRE(b.size() >= 2);
  for (std::size_t i = 1; i < b.size(); ++i) {
    CHECK(b[i].kind != b[i - 1].kind);
    CHECK(b[i].sample > b[i - 1].sample);
  }
}

TEST_CASE("noise, sawtooth, noise gives one onset and one offset") {
  const AudioClip c = clip_of(noise_saw_noise());
  const auto b = find_boundaries(voicing(c.samples), 3);
  REQUIRE(b.size() == 2);
  CHECK(b[0].kind == TransitionKind::Onset);
  CHECK(b[1].kind == TransitionKind::Offset);
  CHECK(std::abs(static_cast<long>(b[0].sample) - 8000) <= 160);
  CHECK(std::abs(static_cast<long>(b[1].sample) - 16000) <= 160);
}

TEST_CASE("segment window arithmetic and edge skipping") {
  AudioClip c = clip_of(std::vector<double>(32000));
  for (std::size_t i = 0; i < c.samples.size(); ++i) c.samples[i] = static_cast<double>(i);
  const ExtractResult r = extract_transitions(c, {{8000, TransitionKind::Onset}, {500, TransitionKind::Offset},
                                                  {31000, TransitionKind::Onset}});
  REQUIRE(r.segments.size() == 1);
  CHECK(r.skipped == 2);
  const auto& s = r.segments[0];
  CHECK(s.samples.size() == 2560);
  CHECK(s.samples.front() == 6720.0);
  CHECK(s.samples.back() == 9279.0);
  CHECK(s.boundary_sample == 8000);
}

TEST_CASE("segments are 2560 samples and give 80 x 41 spectrograms") {
  SynthSpec spec = default_synth_spec();
  const auto& lang = spec.languages[0];
  const SpeakerVoice v = make_speaker(spec, lang, Label::PD, 1, 5);
  const SynthClip sc = synth_clip(spec, lang, v, 0, 5);
  AudioClip c = clip_of(sc.samples);
  const ExtractResult r = segment_clip(c, VoicingConfig{}, SegmentConfig{});
  CHECK(r.segments.size() >= 2);
  for (const auto& s : r.segments) {
    CHECK(s.samples.size() == kTransitionSamples);
    const auto m = mel_spectrogram(s.samples, SpectrogramConfig{});
    CHECK(m.values.rows() == 80);
    CHECK(m.values.cols() == 41);
  }
  for (std::size_t i = 1; i < r.segments.size(); ++i) CHECK(r.segments[i].kind != r.segments[i - 1].kind);
}

TEST_CASE("amplitude scaling leaves boundaries unchanged") {
  const AudioClip c = clip_of(noise_saw_noise());
  AudioClip quiet = c;
  for (auto& v : quiet.samples) v *= 0.05;
  const auto a = segment_clip(c, VoicingConfig{}, SegmentConfig{});
  const auto b = segment_clip(quiet, VoicingConfig{}, SegmentConfig{});
  REQUIRE(a.segments.size() == b.segments.size());
  for (std::size_t i = 0; i < a.segments.size(); ++i) {
    CHECK(a.segments[i].boundary_sample == b.segments[i].boundary_sample);
  }
}

TEST_CASE("planted boundaries are recovered within 10 ms") {
  const SynthSpec spec = default_synth_spec();
  std::size_t planted = 0, hit = 0;
  for (const auto& lang : spec.languages) {
    for (Label l : {Label::PD, Label::HC}) {
      for (int i = 0; i < 3; ++i) {
        const SpeakerVoice v = make_speaker(spec, lang, l, i, 21);
        const SynthClip sc = synth_clip(spec, lang, v, 0, 21);
        const auto found = find_boundaries(voicing(sc.samples), 3);
        for (const auto& p : sc.boundaries) {
          ++planted;
          for (const auto& f : found) {
            if (f.kind == p.kind && std::abs(static_cast<long>(f.sample) - static_cast<long>(p.sample)) <= 160) {
              ++hit;
              break;
            }
          }
        }
      }
    }
  }
  REQUIRE(planted > 100);
  CHECK(static_cast<double>(hit) / planted >= 0.9);
}

TEST_CASE("segment config validation") {
  SegmentConfig c;
  c.min_run = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}
