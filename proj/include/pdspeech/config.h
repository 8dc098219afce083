// include/pdspeech/config.h

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

#ifndef PDSPEECH_CONFIG_H_
#define PDSPEECH_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "pdspeech/cnn.h"
#include "pdspeech/dsp.h"
#include "pdspeech/segment.h"
#include "pdspeech/svm.h"

namespace pdspeech {

struct CvConfig {
  int folds = 10;
  bool operator==(const CvConfig&) const = default;
};

void to_json(nlohmann::json& j, const CvConfig& c);
void from_json(const nlohmann::json& j, CvConfig& c);

// Every tunable of the pipeline in one document. Defaults reproduce the
// published setup: 80 Mel filters, 16 ms / 4 ms STFT, C = 10,
// gamma = 1e-4, 10 folds.
struct PipelineConfig {
  SpectrogramConfig spectrogram;
  MfccConfig mfcc;
  VoicingConfig voicing;
  SegmentConfig segment;
  CnnConfig cnn;
  SvmConfig svm;
  CvConfig cv;
  std::uint64_t seed = 1;
  int workers = 0;  // 0: OpenMP default

  // Checks each section and that segments map onto the CNN input shape.
  void validate() const;
  bool operator==(const PipelineConfig&) const = default;
};

void to_json(nlohmann::json& j, const PipelineConfig& c);
// Missing keys take defaults; unknown keys raise ConfigError.
void from_json(const nlohmann::json& j, PipelineConfig& c);

PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& text);
std::string dump_config(const PipelineConfig& c);

}  // namespace pdspeech

#endif  // PDSPEECH_CONFIG_H_
