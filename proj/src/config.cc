// src/config.cc

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

#include "pdspeech/config.h"

#include <fstream>
#include <sstream>

namespace pdspeech {

namespace {

// Keys of the default-constructed section define what is accepted.
template <typename T>
void check_keys(const nlohmann::json& j, const std::string& section) {
  if (!j.is_object()) throw ConfigError("config section '" + section + "' must be an object");
  const nlohmann::json known = T{};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + section + "." + key + "'");
  }
}

template <typename T>
void read_section(const nlohmann::json& j, const char* name, T& out) {
  if (!j.contains(name)) return;
  check_keys<T>(j.at(name), name);
  out = j.at(name).get<T>();
}

}  // namespace

void to_json(nlohmann::json& j, const CvConfig& c) { j = {{"folds", c.folds}}; }
void from_json(const nlohmann::json& j, CvConfig& c) { c.folds = j.value("folds", CvConfig{}.folds); }

void PipelineConfig::validate() const {
  spectrogram.validate();
  mfcc.validate();
  voicing.validate();
  segment.validate();
  cnn.validate();
  svm.validate();
  if (cv.folds < 2) throw ConfigError("cv.folds must be >= 2");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  if (spectrogram.sample_rate != voicing.sample_rate || spectrogram.sample_rate != mfcc.sample_rate) {
    throw ConfigError("spectrogram, mfcc and voicing sample rates differ");
  }
  const int seg_len = 2 * segment.half_width;
  if (seg_len < spectrogram.hop) throw ConfigError("segment shorter than one STFT hop");
  const int frames = seg_len / spectrogram.hop + 1;
  if (spectrogram.n_mels != cnn.n_mels || frames != cnn.n_frames) {
    throw ConfigError("segments give " + std::to_string(spectrogram.n_mels) + "x" + std::to_string(frames) +
                      " spectrograms but the CNN expects " + std::to_string(cnn.n_mels) + "x" +
                      std::to_string(cnn.n_frames));
  }
}

void to_json(nlohmann::json& j, const PipelineConfig& c) {
  j = {{"spectrogram", c.spectrogram}, {"mfcc", c.mfcc}, {"voicing", c.voicing}, {"segment", c.segment},
       {"cnn", c.cnn},       {"svm", c.svm},         {"cv", c.cv},           {"seed", c.seed},
       {"workers", c.workers}};
}

void from_json(const nlohmann::json& j, PipelineConfig& c) {
  check_keys<PipelineConfig>(j, "config");
  c = PipelineConfig{};
  read_section(j, "spectrogram", c.spectrogram);
  read_section(j, "mfcc", c.mfcc);
  read_section(j, "voicing", c.voicing);
  read_section(j, "segment", c.segment);
  read_section(j, "cnn", c.cnn);
  read_section(j, "svm", c.svm);
  read_section(j, "cv", c.cv);
  c.seed = j.value("seed", c.seed);
  c.workers = j.value("workers", c.workers);
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig c;
  try {
    c = nlohmann::json::parse(text).get<PipelineConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string dump_config(const PipelineConfig& c) { return nlohmann::json(c).dump(2) + "\n"; }

}  // namespace pdspeech
