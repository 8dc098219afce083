// include/pdspeech/corpus.h

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

#ifndef PDSPEECH_CORPUS_H_
#define PDSPEECH_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdspeech/common.h"

namespace pdspeech {

inline constexpr int kPipelineSampleRate = 16000;

enum class Label { PD, HC };
enum class Sex { M, F };
// Onset: unvoiced -> voiced. Offset: voiced -> unvoiced.
enum class TransitionKind { Onset, Offset };

std::string to_string(Label label);
std::string to_string(Sex sex);
std::string to_string(TransitionKind kind);
Label parse_label(const std::string& s);
Sex parse_sex(const std::string& s);

struct SpeakerMeta {
  std::string speaker_id;
  Label label = Label::HC;
  std::string language;
  Sex sex = Sex::M;
  int age = 0;
  // Clinical fields; only meaningful for PD speakers.
  std::optional<int> updrs3;
  std::optional<double> years_since_diagnosis;

  bool operator==(const SpeakerMeta&) const = default;
};

struct UtteranceRecord {
  std::filesystem::path path;
  SpeakerMeta speaker;
  std::string task;

  bool operator==(const UtteranceRecord&) const = default;
};

struct AudioClip {
  std::vector<double> samples;
  int sample_rate = kPipelineSampleRate;
  UtteranceRecord source;
};

class ManifestError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

inline constexpr const char* kManifestHeader =
    "path,speaker_id,label,language,task,sex,age,updrs3,years_since_diagnosis";

// Parses a manifest CSV. Relative audio paths are resolved against the
// manifest's directory. Throws ManifestError naming the offending line or
// speaker.
std::vector<UtteranceRecord> load_manifest(const std::filesystem::path& path);

// Writes records so that load_manifest(path) returns them unchanged. Paths
// under the manifest directory are stored relative to it.
void write_manifest(const std::filesystem::path& path,
                    const std::vector<UtteranceRecord>& records);

// Distinct speakers in first-appearance order.
std::vector<SpeakerMeta> speakers_of(const std::vector<UtteranceRecord>& records);

struct WavData {
  int sample_rate = 0;
  int channels = 0;
  // Interleaved, scaled to [-1, 1).
  std::vector<double> samples;
};

WavData read_wav(const std::filesystem::path& path);
WavData decode_wav(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_wav(std::span<const double> mono, int sample_rate);
void write_wav(const std::filesystem::path& path, std::span<const double> mono,
               int sample_rate);

// Windowed-sinc polyphase resampler, Kaiser window, 64 taps per phase.
// Equal rates return the input unchanged.
std::vector<double> resample(std::span<const double> input, int from_rate,
                             int to_rate);

// Decodes, downmixes and resamples an utterance to the pipeline rate.
AudioClip load_audio(const UtteranceRecord& record);

}  // namespace pdspeech

#endif  // PDSPEECH_CORPUS_H_
