// src/synth.cc

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

#include "pdspeech/synth.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace pdspeech {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSr = kPipelineSampleRate;

void reject_unknown(const json& j, const std::set<std::string>& known, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) {
      throw ConfigError(std::string("unknown key '") + it.key() + "' in " + where);
    }
  }
}

json profile_json(const ClassProfile& p) {
  return {{"onset_ramp_ms", p.onset_ramp_ms},
          {"offset_ramp_ms", p.offset_ramp_ms},
          {"aspiration", p.aspiration},
          {"f0_range_st", p.f0_range_st},
          {"jitter", p.jitter}};
}

ClassProfile profile_from(const json& j, const ClassProfile& d) {
  reject_unknown(j, {"onset_ramp_ms", "offset_ramp_ms", "aspiration", "f0_range_st", "jitter"},
                 "class profile");
  ClassProfile p;
  p.onset_ramp_ms = j.value("onset_ramp_ms", d.onset_ramp_ms);
  p.offset_ramp_ms = j.value("offset_ramp_ms", d.offset_ramp_ms);
  p.aspiration = j.value("aspiration", d.aspiration);
  p.f0_range_st = j.value("f0_range_st", d.f0_range_st);
  p.jitter = j.value("jitter", d.jitter);
  return p;
}

ClassProfile blend(const ClassProfile& a, const ClassProfile& b, double t) {
  auto mix = [t](double x, double y) { return x + t * (y - x); };
  return {mix(a.onset_ramp_ms, b.onset_ramp_ms), mix(a.offset_ramp_ms, b.offset_ramp_ms),
          mix(a.aspiration, b.aspiration), mix(a.f0_range_st, b.f0_range_st),
          mix(a.jitter, b.jitter)};
}

// Raised-cosine rise from 0 at x=0 to 1 at x=1.
double rise(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 0.5 - 0.5 * std::cos(kPi * x);
}

struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  double operator()(double x) {
    const double y = b0 * x + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = x;
    y2 = y1;
    y1 = y;
    return y;
  }
};

// Constant 0 dB peak-gain bandpass.
Biquad bandpass(double center_hz, double q) {
  const double w0 = 2.0 * kPi * center_hz / kSr;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  Biquad f;
  f.b0 = alpha / a0;
  f.b1 = 0.0;
  f.b2 = -alpha / a0;
  f.a1 = -2.0 * std::cos(w0) / a0;
  f.a2 = (1.0 - alpha) / a0;
  return f;
}

// Two-pole formant resonator.
Biquad resonator(double freq_hz, double bw_hz) {
  const double r = std::exp(-kPi * bw_hz / kSr);
  const double theta = 2.0 * kPi * freq_hz / kSr;
  Biquad f;
  f.b0 = 1.0 - r;
  f.a1 = -2.0 * r * std::cos(theta);
  f.a2 = r * r;
  return f;
}

void normalize_rms(std::vector<double>& v, std::size_t begin, std::size_t end) {
  double acc = 0.0;
  for (std::size_t i = begin; i < end; ++i) acc += v[i] * v[i];
  const double rms = std::sqrt(acc / std::max<std::size_t>(1, end - begin));
  if (rms <= 0.0) return;
  for (std::size_t i = begin; i < end; ++i) v[i] /= rms;
}

struct Vowel {
  double f1, f2, f3;
};
constexpr Vowel kVowels[] = {
    {730, 1090, 2440}, {530, 1840, 2480}, {270, 2290, 3010}, {570, 840, 2410}, {300, 870, 2240}};

struct Syllable {
  std::size_t v0 = 0, v1 = 0;  // voiced interval [v0, v1)
  std::size_t ramp_on = 0, ramp_off = 0;
  int vowel = 0;
};

}  // namespace

void SynthSpec::validate() const {
  if (languages.empty()) throw ConfigError("synth spec: no languages");
  if (utterances_per_speaker <= 0) throw ConfigError("synth spec: zero utterances requested");
  if (tasks.empty()) throw ConfigError("synth spec: empty task list");
  for (const auto& t : tasks) {
    if (t.empty()) throw ConfigError("synth spec: empty task name");
  }
  if (!(duration_min_s >= 1.0 && duration_max_s >= duration_min_s)) {
    throw ConfigError("synth spec: duration range must satisfy 1 <= min <= max");
  }
  if (!(hc_severity_max >= 0.0 && pd_severity_min > hc_severity_max &&
        pd_severity_max >= pd_severity_min && pd_severity_max <= 1.0)) {
    throw ConfigError("synth spec: need 0 <= hc_severity_max < pd_severity_min <= pd_severity_max <= 1");
  }
  if (!(pd.onset_ramp_ms > hc.onset_ramp_ms)) {
    throw ConfigError("synth spec: PD onset ramp must exceed HC onset ramp");
  }
  if (ramp_spread < 0.0) throw ConfigError("synth spec: negative ramp_spread");
  std::set<std::string> names;
  std::size_t total_speakers = 0;
  for (const auto& l : languages) {
    if (l.name.empty() || !names.insert(l.name).second) {
      throw ConfigError("synth spec: language names must be non-empty and unique");
    }
    if (l.pd_speakers < 0 || l.hc_speakers < 0) throw ConfigError("synth spec: negative speaker count");
    if (!(l.contrast > 0.0 && l.contrast <= 1.0)) {
      throw ConfigError("synth spec: contrast of '" + l.name + "' must be in (0, 1]");
    }
    if (!(l.voiced_ms_min >= 60.0 && l.voiced_ms_max >= l.voiced_ms_min &&
          l.unvoiced_ms_min >= 40.0 && l.unvoiced_ms_max >= l.unvoiced_ms_min)) {
      throw ConfigError("synth spec: bad duration ranges for '" + l.name + "'");
    }
    if (!(l.fricative_hz > 0.0 && l.fricative_hz < kSr / 2)) {
      throw ConfigError("synth spec: fricative_hz out of range");
    }
    total_speakers += static_cast<std::size_t>(l.pd_speakers + l.hc_speakers);
  }
  if (total_speakers == 0) throw ConfigError("synth spec: zero utterances requested");
}

std::size_t SynthSpec::utterance_count() const {
  std::size_t n = 0;
  for (const auto& l : languages) {
    n += static_cast<std::size_t>(l.pd_speakers + l.hc_speakers) * utterances_per_speaker;
  }
  return n;
}

void to_json(json& j, const SynthSpec& s) {
  json langs = json::array();
  for (const auto& l : s.languages) {
    langs.push_back({{"name", l.name},
                     {"pd_speakers", l.pd_speakers},
                     {"hc_speakers", l.hc_speakers},
                     {"contrast", l.contrast},
                     {"f0_male_hz", l.f0_male_hz},
                     {"f0_female_hz", l.f0_female_hz},
                     {"formant_scale", l.formant_scale},
                     {"fricative_hz", l.fricative_hz},
                     {"fricative_level", l.fricative_level},
                     {"voiced_ms", {l.voiced_ms_min, l.voiced_ms_max}},
                     {"unvoiced_ms", {l.unvoiced_ms_min, l.unvoiced_ms_max}},
                     {"tilt", l.tilt}});
  }
  j = {{"utterances_per_speaker", s.utterances_per_speaker},
       {"duration_s", {s.duration_min_s, s.duration_max_s}},
       {"tasks", s.tasks},
       {"hc", profile_json(s.hc)},
       {"pd", profile_json(s.pd)},
       {"hc_severity_max", s.hc_severity_max},
       {"pd_severity", {s.pd_severity_min, s.pd_severity_max}},
       {"ramp_spread", s.ramp_spread},
       {"languages", langs}};
}

void from_json(const json& j, SynthSpec& s) {
  reject_unknown(j, {"utterances_per_speaker", "duration_s", "tasks", "hc", "pd", "hc_severity_max",
                     "pd_severity", "ramp_spread", "languages"},
                 "synth spec");
  const SynthSpec d;
  s = SynthSpec{};
  s.utterances_per_speaker = j.value("utterances_per_speaker", d.utterances_per_speaker);
  if (j.contains("duration_s")) {
    const auto& r = j.at("duration_s");
    s.duration_min_s = r.at(0).get<double>();
    s.duration_max_s = r.at(1).get<double>();
  }
  s.tasks = j.value("tasks", d.tasks);
  if (j.contains("hc")) s.hc = profile_from(j.at("hc"), d.hc);
  if (j.contains("pd")) s.pd = profile_from(j.at("pd"), d.pd);
  s.hc_severity_max = j.value("hc_severity_max", d.hc_severity_max);
  if (j.contains("pd_severity")) {
    s.pd_severity_min = j.at("pd_severity").at(0).get<double>();
    s.pd_severity_max = j.at("pd_severity").at(1).get<double>();
  }
  s.ramp_spread = j.value("ramp_spread", d.ramp_spread);
  for (const auto& lj : j.at("languages")) {
    reject_unknown(lj, {"name", "pd_speakers", "hc_speakers", "contrast", "f0_male_hz", "f0_female_hz",
                        "formant_scale", "fricative_hz", "fricative_level", "voiced_ms",
                        "unvoiced_ms", "tilt"},
                   "language entry");
    const LanguageSpec ld;
    LanguageSpec l;
    l.name = lj.at("name").get<std::string>();
    l.pd_speakers = lj.value("pd_speakers", ld.pd_speakers);
    l.hc_speakers = lj.value("hc_speakers", ld.hc_speakers);
    l.contrast = lj.value("contrast", ld.contrast);
    l.f0_male_hz = lj.value("f0_male_hz", ld.f0_male_hz);
    l.f0_female_hz = lj.value("f0_female_hz", ld.f0_female_hz);
    l.formant_scale = lj.value("formant_scale", ld.formant_scale);
    l.fricative_hz = lj.value("fricative_hz", ld.fricative_hz);
    l.fricative_level = lj.value("fricative_level", ld.fricative_level);
    if (lj.contains("voiced_ms")) {
      l.voiced_ms_min = lj.at("voiced_ms").at(0).get<double>();
      l.voiced_ms_max = lj.at("voiced_ms").at(1).get<double>();
    }
    if (lj.contains("unvoiced_ms")) {
      l.unvoiced_ms_min = lj.at("unvoiced_ms").at(0).get<double>();
      l.unvoiced_ms_max = lj.at("unvoiced_ms").at(1).get<double>();
    }
    l.tilt = lj.value("tilt", ld.tilt);
    s.languages.push_back(l);
  }
}

SynthSpec load_synth_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open synth spec " + path.string());
  SynthSpec spec;
  try {
    spec = json::parse(in).get<SynthSpec>();
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  spec.validate();
  return spec;
}

SynthSpec default_synth_spec() {
  SynthSpec s;
  LanguageSpec es;
  es.name = "es";
  es.contrast = 1.0;
  LanguageSpec de;
  de.name = "de";
  de.contrast = 0.6;
  de.f0_male_hz = 105.0;
  de.f0_female_hz = 190.0;
  de.formant_scale = 0.94;
  de.fricative_hz = 5200.0;
  de.tilt = 0.45;
  de.voiced_ms_min = 120.0;
  de.voiced_ms_max = 220.0;
  LanguageSpec cs;
  cs.name = "cs";
  cs.contrast = 0.5;
  cs.f0_male_hz = 135.0;
  cs.f0_female_hz = 225.0;
  cs.formant_scale = 1.06;
  cs.fricative_hz = 3800.0;
  cs.tilt = 0.2;
  cs.unvoiced_ms_min = 100.0;
  cs.unvoiced_ms_max = 190.0;
  s.languages = {es, de, cs};
  return s;
}

SpeakerVoice make_speaker(const SynthSpec& spec, const LanguageSpec& lang, Label label, int index,
                          std::uint64_t seed) {
  Rng rng(derive_seed(seed, lang.name + "/" + to_string(label) + "/" + std::to_string(index)));
  SpeakerVoice v;
  char id[64];
  std::snprintf(id, sizeof(id), "%s_%s%03d", lang.name.c_str(), to_string(label).c_str(), index);
  v.meta.speaker_id = id;
  v.meta.label = label;
  v.meta.language = lang.name;
  v.meta.sex = index % 2 == 0 ? Sex::M : Sex::F;
  v.meta.age = 40 + static_cast<int>(rng.below(43));
  if (label == Label::PD) {
    v.severity = rng.uniform(spec.pd_severity_min, spec.pd_severity_max);
    v.meta.updrs3 = std::max(0, static_cast<int>(std::lround(8.0 + 50.0 * v.severity + 5.0 * rng.normal())));
    v.meta.years_since_diagnosis = std::round(rng.uniform(1.0, 16.0) * 10.0) / 10.0;
  } else {
    v.severity = rng.uniform(0.0, spec.hc_severity_max);
  }
  v.profile = blend(spec.hc, spec.pd, v.severity * lang.contrast);
  const double base_f0 = v.meta.sex == Sex::M ? lang.f0_male_hz : lang.f0_female_hz;
  v.f0_hz = std::clamp(base_f0 * std::exp(0.08 * rng.normal()), 80.0, 380.0);
  v.formant_scale = lang.formant_scale * (v.meta.sex == Sex::F ? 1.12 : 1.0) *
                    std::exp(0.03 * rng.normal());
  v.loudness = std::exp(0.2 * rng.normal());
  return v;
}

SynthUtterance synth_utterance(const SynthSpec& spec, const LanguageSpec& lang,
                               const SpeakerVoice& voice, double duration_s, std::uint64_t seed) {
  Rng rng(seed);
  const auto ms = [](double m) { return static_cast<std::size_t>(std::lround(m * kSr / 1000.0)); };
  const std::size_t lead = ms(150.0);
  const std::size_t tail = ms(150.0);
  std::size_t total = static_cast<std::size_t>(std::lround(duration_s * kSr));

  // Syllable plan: fricative then vowel, repeated; always at least two vowels.
  std::vector<Syllable> syl;
  std::size_t cursor = lead;
  const std::size_t final_u = ms(lang.unvoiced_ms_min);
  for (;;) {
    const std::size_t u = ms(rng.uniform(lang.unvoiced_ms_min, lang.unvoiced_ms_max));
    const std::size_t v = ms(rng.uniform(lang.voiced_ms_min, lang.voiced_ms_max));
    if (syl.size() >= 2 && cursor + u + v + final_u + tail > total) break;
    Syllable s;
    s.v0 = cursor + u;
    s.v1 = s.v0 + v;
    auto ramp = [&](double base_ms) {
      const double r = base_ms * std::exp(spec.ramp_spread * rng.normal());
      return std::clamp(ms(r), std::size_t{16}, static_cast<std::size_t>(0.45 * v));
    };
    s.ramp_on = ramp(voice.profile.onset_ramp_ms);
    s.ramp_off = ramp(voice.profile.offset_ramp_ms);
    s.vowel = static_cast<int>(rng.below(std::size(kVowels)));
    syl.push_back(s);
    cursor = s.v1;
  }
  total = std::max(total, cursor + final_u + tail);
  const std::size_t speech_end = total - tail;

  // Glottal source: sawtooth with slow intonation and per-cycle jitter,
  // darkened by a one-pole lowpass.
  std::vector<double> source(total, 0.0);
  {
    const double phase0 = rng.uniform(0.0, 2.0 * kPi);
    const double rate = rng.uniform(0.5, 1.0);
    double phase = rng.uniform();
    double period_scale = 1.0;
    double lp = 0.0;
    for (std::size_t n = 0; n < total; ++n) {
      const double t = n / kSr;
      const double st = 0.5 * voice.profile.f0_range_st * std::sin(2.0 * kPi * rate * t + phase0);
      const double f0 = voice.f0_hz * std::pow(2.0, st / 12.0) / period_scale;
      phase += f0 / kSr;
      if (phase >= 1.0) {
        phase -= 1.0;
        period_scale = 1.0 + voice.profile.jitter * rng.normal();
      }
      const double saw = 2.0 * phase - 1.0;
      lp = (1.0 - lang.tilt) * saw + lang.tilt * lp;
      source[n] = lp;
    }
  }

  std::vector<double> out(total, 0.0);
  const double vowel_rms = 0.12 * voice.loudness;
  const double fric_rms = lang.fricative_level * vowel_rms;

  // Fricative noise for the whole utterance; gated by its envelope below.
  std::vector<double> fric(total);
  {
    Biquad bp = bandpass(lang.fricative_hz, 1.2);
    for (auto& x : fric) x = bp(rng.normal());
    normalize_rms(fric, 0, total);
  }
  std::vector<double> breath(total);
  {
    double prev = 0.0;
    for (auto& x : breath) {
      const double w = rng.normal();
      x = w - prev;
      prev = w;
    }
    normalize_rms(breath, 0, total);
  }

  std::vector<double> voice_env(total, 0.0);
  std::vector<double> fric_env(total, 0.0);
  SynthUtterance result;
  for (std::size_t k = 0; k < syl.size(); ++k) {
    const Syllable& s = syl[k];
    const auto& vw = kVowels[s.vowel];
    std::vector<double> seg(source.begin() + static_cast<long>(s.v0),
                            source.begin() + static_cast<long>(s.v1));
    Biquad f1 = resonator(vw.f1 * voice.formant_scale, 80.0);
    Biquad f2 = resonator(vw.f2 * voice.formant_scale, 110.0);
    Biquad f3 = resonator(vw.f3 * voice.formant_scale, 160.0);
    for (auto& x : seg) x = f3(f2(f1(x)));
    normalize_rms(seg, 0, seg.size());
    for (std::size_t i = 0; i < seg.size(); ++i) {
      const std::size_t n = s.v0 + i;
      double e = 1.0;
      if (i < s.ramp_on) e = rise(static_cast<double>(i) / s.ramp_on);
      const std::size_t from_end = seg.size() - i;
      if (from_end <= s.ramp_off) e = std::min(e, rise(static_cast<double>(from_end - 1) / s.ramp_off));
      voice_env[n] = e;
      out[n] += vowel_rms * e * (seg[i] + voice.profile.aspiration * breath[n]);
    }
    result.boundaries.push_back({s.v0 + s.ramp_on / 2, TransitionKind::Onset,
                                 1000.0 * s.ramp_on / kSr});
    result.boundaries.push_back({s.v1 - s.ramp_off / 2, TransitionKind::Offset,
                                 1000.0 * s.ramp_off / kSr});
  }

  // Fricatives fill the gaps and cross-fade with the vowel ramps.
  const std::size_t edge = ms(5.0);
  for (std::size_t k = 0; k <= syl.size(); ++k) {
    std::size_t start, stop;
    bool fade_in_hard, fade_out_hard;
    if (k == 0) {
      start = lead;
      fade_in_hard = true;
    } else {
      start = syl[k - 1].v1 - syl[k - 1].ramp_off;
      fade_in_hard = false;
    }
    if (k == syl.size()) {
      stop = speech_end;
      fade_out_hard = true;
    } else {
      stop = syl[k].v0 + syl[k].ramp_on;
      fade_out_hard = false;
    }
    for (std::size_t n = start; n < stop; ++n) {
      double e = 1.0;
      if (fade_in_hard) {
        e = std::min(e, rise(static_cast<double>(n - start) / edge));
      } else if (n < syl[k - 1].v1) {
        e = 1.0 - voice_env[n];
      }
      if (fade_out_hard) {
        e = std::min(e, rise(static_cast<double>(stop - 1 - n) / edge));
      } else if (n >= syl[k].v0) {
        e = std::min(e, 1.0 - voice_env[n]);
      }
      fric_env[n] = e;
    }
  }
  for (std::size_t n = 0; n < total; ++n) {
    out[n] += fric_rms * fric_env[n] * fric[n] + 1e-4 * rng.normal();
    out[n] = std::clamp(out[n], -0.999, 0.999);
  }
  result.samples = std::move(out);
  return result;
}

SynthClip synth_clip(const SynthSpec& spec, const LanguageSpec& lang, const SpeakerVoice& voice, int utt,
                     std::uint64_t seed) {
  const std::string uid = voice.meta.speaker_id + "_u" + std::to_string(utt);
  Rng dur_rng(derive_seed(seed, "dur/" + uid));
  const double dur = dur_rng.uniform(spec.duration_min_s, spec.duration_max_s);
  SynthUtterance u = synth_utterance(spec, lang, voice, dur, derive_seed(seed, "utt/" + uid));
  SynthClip clip;
  clip.record.path = fs::path("wav") / lang.name / (uid + ".wav");
  clip.record.speaker = voice.meta;
  clip.record.task = spec.tasks[static_cast<std::size_t>(utt) % spec.tasks.size()];
  clip.samples = std::move(u.samples);
  clip.boundaries = std::move(u.boundaries);
  return clip;
}

SynthResult synth_corpus(const SynthSpec& spec, std::uint64_t seed, const fs::path& out_dir) {
  spec.validate();
  std::error_code ec;
  fs::create_directories(out_dir / "wav", ec);
  if (ec) throw IoError("cannot create " + (out_dir / "wav").string() + ": " + ec.message());

  SynthResult result;
  result.manifest = out_dir / "manifest.csv";
  result.planted = out_dir / "planted_boundaries.csv";

  struct Job {
    const LanguageSpec* lang;
    SpeakerVoice voice;
    int utt;
  };
  std::vector<Job> jobs;
  for (const auto& lang : spec.languages) {
    for (Label label : {Label::PD, Label::HC}) {
      const int count = label == Label::PD ? lang.pd_speakers : lang.hc_speakers;
      for (int i = 0; i < count; ++i) {
        SpeakerVoice v = make_speaker(spec, lang, label, i, seed);
        for (int u = 0; u < spec.utterances_per_speaker; ++u) jobs.push_back({&lang, v, u});
      }
    }
    fs::create_directories(out_dir / "wav" / lang.name, ec);
    if (ec) throw IoError("cannot create directory for " + lang.name + ": " + ec.message());
  }

  result.records.resize(jobs.size());
  result.boundaries.resize(jobs.size());
  std::vector<std::string> errors(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(jobs.size()); ++i) {
    const Job& job = jobs[static_cast<std::size_t>(i)];
    try {
      SynthClip clip = synth_clip(spec, *job.lang, job.voice, job.utt, seed);
      clip.record.path = (out_dir / clip.record.path).lexically_normal();
      write_wav(clip.record.path, clip.samples, kPipelineSampleRate);
      result.records[static_cast<std::size_t>(i)] = std::move(clip.record);
      result.boundaries[static_cast<std::size_t>(i)] = std::move(clip.boundaries);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw IoError(e);
  }

  write_manifest(result.manifest, result.records);
  std::ostringstream planted;
  planted << "path,boundary_sample,kind\n";
  const fs::path base = out_dir.lexically_normal();
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto rel = result.records[i].path.lexically_relative(base).generic_string();
    for (const auto& b : result.boundaries[i]) {
      planted << rel << ',' << b.sample << ',' << to_string(b.kind) << '\n';
    }
  }
  std::ofstream pf(result.planted, std::ios::binary);
  if (!pf) throw IoError("cannot write " + result.planted.string());
  pf << planted.str();
  return result;
}

}  // namespace pdspeech
