// src/checkpoint.cc

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

#include "pdspeech/checkpoint.h"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

namespace pdspeech {

nlohmann::json architecture_json(const CnnConfig& cfg) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : cnn_layers(cfg)) {
    layers.push_back({{"kind", nn::to_string(l.kind)}, {"in", l.in}, {"out", l.out}, {"rate", l.rate}});
  }
  return {{"input", {1, cfg.n_mels, cfg.n_frames}}, {"layers", layers}};
}

std::string architecture_hash(const CnnConfig& cfg) {
  const std::string text = architecture_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

constexpr char kMagic[4] = {'P', 'D', 'X', 'F'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}
  const std::uint8_t* take(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw TruncatedCheckpointError(std::string("checkpoint truncated while reading ") + what);
    }
    const std::uint8_t* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> save_checkpoint(const PdCnn& model) {
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& t : model.net.param_tensors()) tensors.push_back({{"name", t.name}, {"shape", t.shape}});
  const nlohmann::json header = {
      {"architecture", architecture_json(model.config)},
      {"arch_hash", architecture_hash(model.config)},
      {"config", model.config},
      {"tensors", tensors},
      {"norm", {{"mean", model.norm_mean}, {"std", model.norm_std}}},
      {"provenance",
       {{"base_language", model.provenance.base_language},
        {"target_language", model.provenance.target_language},
        {"seed", model.provenance.seed},
        {"epochs", model.provenance.epochs}}},
  };
  const std::string text = header.dump();
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  out.push_back(kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  out.reserve(out.size() + 4 * model.net.parameter_count());
  for (float v : model.net.params()) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    put_u32(out, u);
  }
  return out;
}

PdCnn load_checkpoint(std::span<const std::uint8_t> bytes, const std::optional<CnnConfig>& expected) {
  Reader r(bytes);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw BadMagicError("not a .pdxf checkpoint (bad magic)");
  }
  r.take(4, "magic");
  const std::uint8_t version = *r.take(1, "version");
  if (version != kCheckpointVersion) {
    throw UnsupportedVersionError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t header_len = get_u32(r.take(4, "header length"));
  const auto* hp = r.take(header_len, "header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hp, hp + header_len);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
  }

  CnnConfig cfg;
  try {
    cfg = header.at("config").get<CnnConfig>();
    cfg.validate();
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint holds an invalid config: ") + e.what());
  }
  const std::string hash = header.value("arch_hash", "");
  if (hash != architecture_hash(cfg)) throw CheckpointError("checkpoint architecture hash does not match its config");
  if (expected && architecture_hash(*expected) != hash) {
    throw ArchitectureMismatchError("checkpoint architecture " + hash + " does not match the configured network " +
                                    architecture_hash(*expected));
  }

  PdCnn model(cfg);
  const auto& tensors = header.at("tensors");
  const auto& want = model.net.param_tensors();
  if (tensors.size() != want.size()) throw CheckpointError("checkpoint tensor list does not match its architecture");
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (tensors[i].at("shape").get<std::vector<std::size_t>>() != want[i].shape) {
      throw CheckpointError("checkpoint tensor " + want[i].name + " has the wrong shape");
    }
  }
  auto& params = model.net.params();
  const auto* blob = r.take(4 * params.size(), "parameters");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::uint32_t u = get_u32(blob + 4 * i);
    std::memcpy(&params[i], &u, 4);
  }
  if (r.remaining() != 0) throw CheckpointError("checkpoint has trailing bytes");

  model.norm_mean = header.at("norm").at("mean").get<double>();
  model.norm_std = header.at("norm").at("std").get<double>();
  const auto& p = header.at("provenance");
  model.provenance.base_language = p.value("base_language", "");
  model.provenance.target_language = p.value("target_language", "");
  model.provenance.seed = p.value("seed", std::uint64_t{0});
  model.provenance.epochs = p.value("epochs", 0);
  return model;
}

void write_checkpoint(const std::filesystem::path& path, const PdCnn& model) {
  const auto bytes = save_checkpoint(model);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("write failed: " + path.string());
}

PdCnn read_checkpoint(const std::filesystem::path& path, const std::optional<CnnConfig>& expected) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return load_checkpoint(bytes, expected);
}

}  // namespace pdspeech
