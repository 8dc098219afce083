// include/pdspeech/checkpoint.h

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

#ifndef PDSPEECH_CHECKPOINT_H_
#define PDSPEECH_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdspeech/cnn.h"

namespace pdspeech {

// .pdxf layout:
//   "PDXF" | version (u8) | header length (u32 LE) | JSON header |
//   float32 LE parameter blobs in the order listed by header["tensors"].
inline constexpr std::uint8_t kCheckpointVersion = 1;

class CheckpointError : public Error {
 public:
  using Error::Error;
};
class BadMagicError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
class UnsupportedVersionError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
class TruncatedCheckpointError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};
class ArchitectureMismatchError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

// Canonical JSON of the layer stack and input shape.
nlohmann::json architecture_json(const CnnConfig& cfg);
// FNV-1a of the canonical architecture JSON, as 16 hex digits.
std::string architecture_hash(const CnnConfig& cfg);

std::vector<std::uint8_t> save_checkpoint(const PdCnn& model);
// When expected is given, its architecture must match the stored one.
PdCnn load_checkpoint(std::span<const std::uint8_t> bytes,
                      const std::optional<CnnConfig>& expected = std::nullopt);

void write_checkpoint(const std::filesystem::path& path, const PdCnn& model);
PdCnn read_checkpoint(const std::filesystem::path& path,
                      const std::optional<CnnConfig>& expected = std::nullopt);

}  // namespace pdspeech

#endif  // PDSPEECH_CHECKPOINT_H_
