// src/corpus.cc

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

#include "pdspeech/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace pdspeech {

namespace fs = std::filesystem;

std::string to_string(Label label) { return label == Label::PD ? "PD" : "HC"; }
std::string to_string(Sex sex) { return sex == Sex::M ? "M" : "F"; }
std::string to_string(TransitionKind kind) {
  return kind == TransitionKind::Onset ? "onset" : "offset";
}

Label parse_label(const std::string& s) {
  if (s == "PD") return Label::PD;
  if (s == "HC") return Label::HC;
  throw ManifestError("unknown label '" + s + "' (expected PD or HC)");
}

Sex parse_sex(const std::string& s) {
  if (s == "M") return Sex::M;
  if (s == "F") return Sex::F;
  throw ManifestError("unknown sex '" + s + "' (expected M or F)");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ManifestError("unterminated quote");
  fields.push_back(std::move(cur));
  return fields;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <typename T>
T parse_number(const std::string& s, const char* what) {
  T value{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ManifestError(std::string("bad ") + what + " '" + s + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::vector<UtteranceRecord> load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  const fs::path base = path.parent_path();

  std::string line;
  if (!std::getline(in, line)) throw ManifestError("empty manifest " + path.string());
  line = strip_cr(line);
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (line != kManifestHeader) {
    throw ManifestError("manifest line 1: header must be '" +
                        std::string(kManifestHeader) + "'");
  }

  std::vector<UtteranceRecord> records;
  std::map<std::string, SpeakerMeta> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    UtteranceRecord rec;
    try {
      const auto f = split_csv_line(line);
      if (f.size() != 9) {
        throw ManifestError("expected 9 fields, got " + std::to_string(f.size()));
      }
      if (f[0].empty()) throw ManifestError("empty path");
      if (f[1].empty()) throw ManifestError("empty speaker_id");
      if (f[4].empty()) throw ManifestError("empty task");
      fs::path p(f[0]);
      rec.path = p.is_absolute() ? p.lexically_normal() : (base / p).lexically_normal();
      rec.speaker.speaker_id = f[1];
      rec.speaker.label = parse_label(f[2]);
      rec.speaker.language = f[3];
      rec.task = f[4];
      rec.speaker.sex = parse_sex(f[5]);
      rec.speaker.age = parse_number<int>(f[6], "age");
      if (rec.speaker.age < 0) throw ManifestError("negative age");
      if (!f[7].empty()) {
        const int u = parse_number<int>(f[7], "updrs3");
        if (u < 0) throw ManifestError("negative updrs3");
        rec.speaker.updrs3 = u;
      }
      if (!f[8].empty()) {
        const double y = parse_number<double>(f[8], "years_since_diagnosis");
        if (!(y >= 0.0) || !std::isfinite(y)) {
          throw ManifestError("bad years_since_diagnosis");
        }
        rec.speaker.years_since_diagnosis = y;
      }
      if (rec.speaker.label == Label::HC &&
          (rec.speaker.updrs3 || rec.speaker.years_since_diagnosis)) {
        throw ManifestError("HC speaker " + rec.speaker.speaker_id +
                            " carries clinical fields");
      }
    } catch (const ManifestError& e) {
      throw ManifestError(path.string() + " line " + std::to_string(line_no) +
                          ": " + e.what());
    }
    auto [it, inserted] = seen.emplace(rec.speaker.speaker_id, rec.speaker);
    if (!inserted && !(it->second == rec.speaker)) {
      throw ManifestError("inconsistent metadata for speaker '" +
                          rec.speaker.speaker_id + "' (line " +
                          std::to_string(line_no) + ")");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_manifest(const fs::path& path, const std::vector<UtteranceRecord>& records) {
  const fs::path base = path.parent_path().lexically_normal();
  std::ostringstream out;
  out << kManifestHeader << '\n';
  for (const auto& r : records) {
    fs::path p = r.path.lexically_normal();
    if (!p.is_absolute() || base.is_absolute()) {
      const fs::path rel = p.lexically_relative(base.empty() ? fs::path(".") : base);
      if (!rel.empty() && *rel.begin() != "..") p = rel;
    }
    const auto& s = r.speaker;
    out << csv_field(p.generic_string()) << ',' << csv_field(s.speaker_id) << ','
        << to_string(s.label) << ',' << csv_field(s.language) << ','
        << csv_field(r.task) << ',' << to_string(s.sex) << ',' << s.age << ','
        << (s.updrs3 ? std::to_string(*s.updrs3) : "") << ','
        << (s.years_since_diagnosis ? format_double(*s.years_since_diagnosis) : "")
        << '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write manifest " + path.string());
  f << out.str();
  if (!f) throw IoError("write failed for " + path.string());
}

std::vector<SpeakerMeta> speakers_of(const std::vector<UtteranceRecord>& records) {
  std::vector<SpeakerMeta> out;
  std::map<std::string, bool> seen;
  for (const auto& r : records) {
    if (seen.emplace(r.speaker.speaker_id, true).second) out.push_back(r.speaker);
  }
  return out;
}

// ---------------------------------------------------------------------------
// WAV

namespace {

std::uint32_t read_u32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}
std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}
void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::string describe_encoding(std::uint16_t format, std::uint16_t bits) {
  switch (format) {
    case 1: return std::to_string(bits) + "-bit PCM";
    case 3: return std::to_string(bits) + "-bit IEEE float";
    case 6: return "A-law";
    case 7: return "mu-law";
    default: return "format tag " + std::to_string(format);
  }
}

}  // namespace

WavData decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) throw DecodeError("truncated WAV header");
  if (std::string(bytes.begin(), bytes.begin() + 4) != "RIFF" ||
      std::string(bytes.begin() + 8, bytes.begin() + 12) != "WAVE") {
    throw DecodeError("not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id(bytes.begin() + pos, bytes.begin() + pos + 4);
    const std::uint32_t size = read_u32(&bytes[pos + 4]);
    const std::size_t body = pos + 8;
    if (id == "fmt ") {
      if (size < 16 || body + 16 > bytes.size()) throw DecodeError("truncated fmt chunk");
      format = read_u16(&bytes[body]);
      channels = read_u16(&bytes[body + 2]);
      rate = read_u32(&bytes[body + 4]);
      bits = read_u16(&bytes[body + 14]);
      if (format == 0xFFFE && size >= 40 && body + 26 <= bytes.size()) {
        format = read_u16(&bytes[body + 24]);  // extensible: sub-format GUID head
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw DecodeError("data chunk before fmt chunk");
      if (format != 1 || bits != 16) {
        throw DecodeError("unsupported encoding: " + describe_encoding(format, bits));
      }
      if (channels == 0 || rate == 0) throw DecodeError("invalid fmt chunk");
      if (body + size > bytes.size()) throw DecodeError("truncated data chunk");
      if (size % (2u * channels) != 0) throw DecodeError("partial sample frame in data chunk");
      WavData wav;
      wav.sample_rate = static_cast<int>(rate);
      wav.channels = channels;
      wav.samples.resize(size / 2);
      for (std::size_t i = 0; i < wav.samples.size(); ++i) {
        const auto v = static_cast<std::int16_t>(read_u16(&bytes[body + 2 * i]));
        wav.samples[i] = v / 32768.0;
      }
      return wav;
    }
    pos = body + size + (size & 1u);
  }
  throw DecodeError(have_fmt ? "missing data chunk" : "missing fmt chunk");
}

WavData read_wav(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_wav(std::span<const double> mono, int sample_rate) {
  const auto data_bytes = static_cast<std::uint32_t>(mono.size() * 2);
  std::vector<std::uint8_t> b;
  b.reserve(44 + data_bytes);
  for (char c : std::string("RIFF")) b.push_back(static_cast<std::uint8_t>(c));
  put_u32(b, 36 + data_bytes);
  for (char c : std::string("WAVEfmt ")) b.push_back(static_cast<std::uint8_t>(c));
  put_u32(b, 16);
  put_u16(b, 1);
  put_u16(b, 1);
  put_u32(b, static_cast<std::uint32_t>(sample_rate));
  put_u32(b, static_cast<std::uint32_t>(sample_rate * 2));
  put_u16(b, 2);
  put_u16(b, 16);
  for (char c : std::string("data")) b.push_back(static_cast<std::uint8_t>(c));
  put_u32(b, data_bytes);
  for (double x : mono) {
    const double c = std::clamp(x, -1.0, 1.0);
    const auto v = static_cast<std::int16_t>(std::lround(c * 32767.0));
    put_u16(b, static_cast<std::uint16_t>(v));
  }
  return b;
}

void write_wav(const fs::path& path, std::span<const double> mono, int sample_rate) {
  const auto bytes = encode_wav(mono, sample_rate);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Resampling

std::vector<double> resample(std::span<const double> input, int from_rate, int to_rate) {
  if (from_rate <= 0 || to_rate <= 0) throw ConfigError("resample: rates must be positive");
  if (from_rate == to_rate) return {input.begin(), input.end()};

  const long g = std::gcd(from_rate, to_rate);
  const long up = to_rate / g;
  const long down = from_rate / g;
  constexpr int kTaps = 64;
  constexpr int kHalf = kTaps / 2;
  constexpr double kBeta = 8.0;
  // Cutoff relative to the input Nyquist, with a little guard band.
  const double cutoff = std::min(1.0, static_cast<double>(up) / down) * 0.94;
  const double i0_beta = std::cyl_bessel_i(0.0, kBeta);

  // Phase p holds taps for output positions whose fractional input offset is p/up.
  std::vector<double> bank(static_cast<std::size_t>(up) * kTaps);
  for (long p = 0; p < up; ++p) {
    const double frac = static_cast<double>(p) / up;
    double* taps = &bank[static_cast<std::size_t>(p) * kTaps];
    for (int k = 0; k < kTaps; ++k) {
      // Tap k multiplies input sample floor(t) - kHalf + 1 + k.
      const double t = frac + kHalf - 1 - k;
      const double r = t / kHalf;
      const double w = std::abs(r) >= 1.0
                           ? 0.0
                           : std::cyl_bessel_i(0.0, kBeta * std::sqrt(1.0 - r * r)) / i0_beta;
      const double x = cutoff * t;
      const double sinc = x == 0.0 ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
      taps[k] = cutoff * sinc * w;
    }
  }

  const long n_in = static_cast<long>(input.size());
  const long n_out = (n_in * up + down - 1) / down;
  std::vector<double> out(static_cast<std::size_t>(n_out));
  for (long n = 0; n < n_out; ++n) {
    const long num = n * down;
    const long base = num / up;
    const long phase = num % up;
    const double* taps = &bank[static_cast<std::size_t>(phase) * kTaps];
    double acc = 0.0;
    for (int k = 0; k < kTaps; ++k) {
      const long idx = base - kHalf + 1 + k;
      if (idx >= 0 && idx < n_in) acc += taps[k] * input[static_cast<std::size_t>(idx)];
    }
    out[static_cast<std::size_t>(n)] = acc;
  }
  return out;
}

AudioClip load_audio(const UtteranceRecord& record) {
  WavData wav = read_wav(record.path);
  std::vector<double> mono(wav.samples.size() / wav.channels);
  for (std::size_t i = 0; i < mono.size(); ++i) {
    double acc = 0.0;
    for (int c = 0; c < wav.channels; ++c) acc += wav.samples[i * wav.channels + c];
    mono[i] = acc / wav.channels;
  }
  AudioClip clip;
  clip.samples = resample(mono, wav.sample_rate, kPipelineSampleRate);
  for (double& x : clip.samples) x = std::clamp(x, -1.0, 1.0);
  clip.sample_rate = kPipelineSampleRate;
  clip.source = record;
  return clip;
}

}  // namespace pdspeech
