// src/dsp.cc

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

#include "pdspeech/dsp.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pdspeech/fft.h"

namespace pdspeech {

// JSON readers fall back to the defaults for absent keys.
#define PDSPEECH_JSON_FIELD(name) j[#name] = c.name;
#define PDSPEECH_JSON_READ(name) c.name = j.value(#name, d.name);

void to_json(nlohmann::json& j, const SpectrogramConfig& c) {
  PDSPEECH_JSON_FIELD(sample_rate) PDSPEECH_JSON_FIELD(window_len) PDSPEECH_JSON_FIELD(hop)
  PDSPEECH_JSON_FIELD(fft_len) PDSPEECH_JSON_FIELD(n_mels) PDSPEECH_JSON_FIELD(fmin)
  PDSPEECH_JSON_FIELD(fmax) PDSPEECH_JSON_FIELD(log_floor)
}
void from_json(const nlohmann::json& j, SpectrogramConfig& c) {
  const SpectrogramConfig d;
  PDSPEECH_JSON_READ(sample_rate) PDSPEECH_JSON_READ(window_len) PDSPEECH_JSON_READ(hop)
  PDSPEECH_JSON_READ(fft_len) PDSPEECH_JSON_READ(n_mels) PDSPEECH_JSON_READ(fmin)
  PDSPEECH_JSON_READ(fmax) PDSPEECH_JSON_READ(log_floor)
}

void to_json(nlohmann::json& j, const MfccConfig& c) {
  PDSPEECH_JSON_FIELD(sample_rate) PDSPEECH_JSON_FIELD(n_coeffs) PDSPEECH_JSON_FIELD(n_mel_filters)
  PDSPEECH_JSON_FIELD(n_bark_bands) PDSPEECH_JSON_FIELD(delta_window) PDSPEECH_JSON_FIELD(frame_len)
  PDSPEECH_JSON_FIELD(hop) PDSPEECH_JSON_FIELD(fft_len) PDSPEECH_JSON_FIELD(fmax)
  PDSPEECH_JSON_FIELD(log_floor)
}
void from_json(const nlohmann::json& j, MfccConfig& c) {
  const MfccConfig d;
  PDSPEECH_JSON_READ(sample_rate) PDSPEECH_JSON_READ(n_coeffs) PDSPEECH_JSON_READ(n_mel_filters)
  PDSPEECH_JSON_READ(n_bark_bands) PDSPEECH_JSON_READ(delta_window) PDSPEECH_JSON_READ(frame_len)
  PDSPEECH_JSON_READ(hop) PDSPEECH_JSON_READ(fft_len) PDSPEECH_JSON_READ(fmax)
  PDSPEECH_JSON_READ(log_floor)
}

void to_json(nlohmann::json& j, const VoicingConfig& c) {
  PDSPEECH_JSON_FIELD(sample_rate) PDSPEECH_JSON_FIELD(frame_len) PDSPEECH_JSON_FIELD(hop)
  PDSPEECH_JSON_FIELD(f0_min) PDSPEECH_JSON_FIELD(f0_max) PDSPEECH_JSON_FIELD(peak_threshold)
  PDSPEECH_JSON_FIELD(energy_ratio)
}
void from_json(const nlohmann::json& j, VoicingConfig& c) {
  const VoicingConfig d;
  PDSPEECH_JSON_READ(sample_rate) PDSPEECH_JSON_READ(frame_len) PDSPEECH_JSON_READ(hop)
  PDSPEECH_JSON_READ(f0_min) PDSPEECH_JSON_READ(f0_max) PDSPEECH_JSON_READ(peak_threshold)
  PDSPEECH_JSON_READ(energy_ratio)
}

#undef PDSPEECH_JSON_FIELD
#undef PDSPEECH_JSON_READ

namespace {

constexpr double kPi = std::numbers::pi;

// Reflect index into [0, n) without repeating the edge sample.
std::size_t reflect_index(long i, long n) {
  if (n == 1) return 0;
  const long period = 2 * (n - 1);
  long m = i % period;
  if (m < 0) m += period;
  if (m >= n) m = period - m;
  return static_cast<std::size_t>(m);
}

}  // namespace

void SpectrogramConfig::validate() const {
  if (sample_rate <= 0) throw ConfigError("spectrogram: sample_rate must be positive");
  if (!(hop > 0 && hop <= window_len && window_len <= fft_len)) {
    throw ConfigError("spectrogram: need 0 < hop <= window_len <= fft_len");
  }
  if (fft_len % 2 != 0) throw ConfigError("spectrogram: fft_len must be even");
  if (n_mels < 2) throw ConfigError("spectrogram: n_mels must be >= 2");
  if (!(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0)) {
    throw ConfigError("spectrogram: need 0 <= fmin < fmax <= sample_rate/2");
  }
  if (!(log_floor > 0.0)) throw ConfigError("spectrogram: log_floor must be positive");
}

void MfccConfig::validate() const {
  if (!(n_coeffs >= 1 && n_coeffs < n_mel_filters)) {
    throw ConfigError("mfcc: need 1 <= n_coeffs < n_mel_filters");
  }
  if (n_bark_bands < 1) throw ConfigError("mfcc: n_bark_bands must be >= 1");
  if (delta_window < 1) throw ConfigError("mfcc: delta_window must be >= 1");
  if (!(hop > 0 && frame_len > 0 && frame_len <= fft_len)) {
    throw ConfigError("mfcc: need hop > 0 and 0 < frame_len <= fft_len");
  }
  if (!(fmax > 0.0 && fmax <= sample_rate / 2.0)) throw ConfigError("mfcc: fmax out of range");
  if (!(log_floor > 0.0)) throw ConfigError("mfcc: log_floor must be positive");
}

void VoicingConfig::validate() const {
  if (!(hop > 0 && frame_len > 0)) throw ConfigError("voicing: frame_len and hop must be positive");
  if (!(f0_min > 0.0 && f0_min < f0_max)) throw ConfigError("voicing: need 0 < f0_min < f0_max");
  if (sample_rate / f0_min >= frame_len) throw ConfigError("voicing: frame too short for f0_min");
  if (!(peak_threshold > 0.0 && peak_threshold < 1.0)) {
    throw ConfigError("voicing: peak_threshold must be in (0, 1)");
  }
  if (energy_ratio < 0.0) throw ConfigError("voicing: negative energy_ratio");
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }
double hz_to_bark(double hz) { return 26.81 * hz / (1960.0 + hz) - 0.53; }
double bark_to_hz(double bark) { return 1960.0 * (bark + 0.53) / (26.28 - bark); }

std::vector<double> hann(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
  return w;
}

MatrixD triangular_filterbank(int n_filters, int n_bins, int fft_len, int sample_rate, double lo_hz,
                              double hi_hz, double (*to_scale)(double)) {
  const double lo = to_scale(lo_hz);
  const double hi = to_scale(hi_hz);
  std::vector<double> points(static_cast<std::size_t>(n_filters) + 2);
  for (std::size_t i = 0; i < points.size(); ++i) {
    points[i] = lo + (hi - lo) * static_cast<double>(i) / (n_filters + 1);
  }
  MatrixD fb(static_cast<std::size_t>(n_filters), static_cast<std::size_t>(n_bins), 0.0);
  for (int k = 0; k < n_bins; ++k) {
    const double s = to_scale(static_cast<double>(k) * sample_rate / fft_len);
    for (int m = 0; m < n_filters; ++m) {
      const double left = points[static_cast<std::size_t>(m)];
      const double centre = points[static_cast<std::size_t>(m) + 1];
      const double right = points[static_cast<std::size_t>(m) + 2];
      double w = 0.0;
      if (s > left && s <= centre) {
        w = (s - left) / (centre - left);
      } else if (s > centre && s < right) {
        w = (right - s) / (right - centre);
      }
      fb(static_cast<std::size_t>(m), static_cast<std::size_t>(k)) = w;
    }
  }
  return fb;
}

Matrix<std::complex<double>> stft(std::span<const double> clip, const SpectrogramConfig& cfg) {
  cfg.validate();
  if (clip.size() < static_cast<std::size_t>(cfg.hop)) {
    throw ShapeError("stft: clip shorter than one hop");
  }
  const long n = static_cast<long>(clip.size());
  const long pad = cfg.window_len / 2;
  const std::size_t n_frames = clip.size() / static_cast<std::size_t>(cfg.hop) + 1;
  const std::size_t n_bins = static_cast<std::size_t>(cfg.n_bins());
  const auto window = hann(cfg.window_len);
  RealFft fft(static_cast<std::size_t>(cfg.fft_len));

  Matrix<std::complex<double>> out(n_bins, n_frames);
  std::vector<double> frame(static_cast<std::size_t>(cfg.fft_len));
  std::vector<std::complex<double>> spec(fft.bins());
  for (std::size_t t = 0; t < n_frames; ++t) {
    std::fill(frame.begin(), frame.end(), 0.0);
    const long start = static_cast<long>(t) * cfg.hop - pad;
    for (int i = 0; i < cfg.window_len; ++i) {
      frame[static_cast<std::size_t>(i)] =
          clip[reflect_index(start + i, n)] * window[static_cast<std::size_t>(i)];
    }
    fft.forward(frame.data(), spec.data());
    for (std::size_t k = 0; k < n_bins; ++k) out(k, t) = spec[k];
  }
  return out;
}

MatrixD mel_filterbank(const SpectrogramConfig& cfg) {
  cfg.validate();
  return triangular_filterbank(cfg.n_mels, cfg.n_bins(), cfg.fft_len, cfg.sample_rate, cfg.fmin,
                               cfg.fmax, hz_to_mel);
}

MelSpectrogram mel_spectrogram(std::span<const double> clip, const SpectrogramConfig& cfg) {
  return mel_spectrogram(clip, cfg, mel_filterbank(cfg));
}

MelSpectrogram mel_spectrogram(std::span<const double> clip, const SpectrogramConfig& cfg,
                               const MatrixD& filterbank) {
  const auto spec = stft(clip, cfg);
  if (filterbank.rows() != static_cast<std::size_t>(cfg.n_mels) || filterbank.cols() != spec.rows()) {
    throw ShapeError("mel_spectrogram: filterbank does not match config");
  }
  const std::size_t n_frames = spec.cols();
  MatrixD power(spec.rows(), n_frames);
  for (std::size_t k = 0; k < spec.rows(); ++k) {
    for (std::size_t t = 0; t < n_frames; ++t) power(k, t) = std::norm(spec(k, t));
  }
  MelSpectrogram mel;
  mel.config = cfg;
  mel.values = MatrixD(filterbank.rows(), n_frames);
  for (std::size_t m = 0; m < filterbank.rows(); ++m) {
    const double* w = filterbank.row(m);
    for (std::size_t t = 0; t < n_frames; ++t) {
      double acc = 0.0;
      for (std::size_t k = 0; k < power.rows(); ++k) acc += w[k] * power(k, t);
      mel.values(m, t) = std::log(std::max(acc, cfg.log_floor));
    }
  }
  return mel;
}

MatrixD frame_power_spectra(std::span<const double> clip, int frame_len, int hop, int fft_len) {
  if (clip.size() < static_cast<std::size_t>(frame_len)) {
    throw ShapeError("clip shorter than one analysis frame");
  }
  const std::size_t n_frames = (clip.size() - static_cast<std::size_t>(frame_len)) / hop + 1;
  const auto window = hann(frame_len);
  RealFft fft(static_cast<std::size_t>(fft_len));
  MatrixD out(fft.bins(), n_frames);
  std::vector<double> frame(static_cast<std::size_t>(fft_len));
  std::vector<std::complex<double>> spec(fft.bins());
  for (std::size_t t = 0; t < n_frames; ++t) {
    std::fill(frame.begin(), frame.end(), 0.0);
    const std::size_t start = t * static_cast<std::size_t>(hop);
    for (int i = 0; i < frame_len; ++i) {
      frame[static_cast<std::size_t>(i)] = clip[start + static_cast<std::size_t>(i)] *
                                           window[static_cast<std::size_t>(i)];
    }
    fft.forward(frame.data(), spec.data());
    for (std::size_t k = 0; k < spec.size(); ++k) out(k, t) = std::norm(spec[k]);
  }
  return out;
}

namespace {

MatrixD apply_log_filterbank(const MatrixD& fb, const MatrixD& power, double floor) {
  MatrixD out(fb.rows(), power.cols());
  for (std::size_t m = 0; m < fb.rows(); ++m) {
    for (std::size_t t = 0; t < power.cols(); ++t) {
      double acc = 0.0;
      for (std::size_t k = 0; k < power.rows(); ++k) acc += fb(m, k) * power(k, t);
      out(m, t) = std::log(std::max(acc, floor));
    }
  }
  return out;
}

}  // namespace

MatrixD mfcc_log_mel(std::span<const double> clip, const MfccConfig& cfg) {
  cfg.validate();
  const MatrixD power = frame_power_spectra(clip, cfg.frame_len, cfg.hop, cfg.fft_len);
  const MatrixD fb = triangular_filterbank(cfg.n_mel_filters, static_cast<int>(power.rows()), cfg.fft_len,
                                           cfg.sample_rate, 0.0, cfg.fmax, hz_to_mel);
  return apply_log_filterbank(fb, power, cfg.log_floor);
}

MatrixD mfcc(std::span<const double> clip, const MfccConfig& cfg) {
  const MatrixD logmel = mfcc_log_mel(clip, cfg);
  const std::size_t m = logmel.rows();
  // Orthonormal DCT-II basis rows 1..n_coeffs.
  MatrixD basis(static_cast<std::size_t>(cfg.n_coeffs), m);
  const double scale = std::sqrt(2.0 / m);
  for (std::size_t k = 1; k <= basis.rows(); ++k) {
    for (std::size_t j = 0; j < m; ++j) {
      basis(k - 1, j) = scale * std::cos(kPi * k * (j + 0.5) / m);
    }
  }
  MatrixD out(basis.rows(), logmel.cols());
  for (std::size_t k = 0; k < basis.rows(); ++k) {
    for (std::size_t t = 0; t < logmel.cols(); ++t) {
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += basis(k, j) * logmel(j, t);
      out(k, t) = acc;
    }
  }
  return out;
}

MatrixD deltas(const MatrixD& features, int window) {
  if (window < 1) throw ConfigError("deltas: window must be >= 1");
  const long cols = static_cast<long>(features.cols());
  double denom = 0.0;
  for (int n = 1; n <= window; ++n) denom += n * n;
  denom *= 2.0;
  MatrixD out(features.rows(), features.cols());
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const double* x = features.row(r);
    for (long t = 0; t < cols; ++t) {
      double acc = 0.0;
      for (int n = 1; n <= window; ++n) {
        const long ahead = std::min(t + n, cols - 1);
        const long behind = std::max(t - n, 0L);
        acc += n * (x[ahead] - x[behind]);
      }
      out(r, static_cast<std::size_t>(t)) = acc / denom;
    }
  }
  return out;
}

MatrixD bark_energies(std::span<const double> clip, const MfccConfig& cfg) {
  cfg.validate();
  const MatrixD power = frame_power_spectra(clip, cfg.frame_len, cfg.hop, cfg.fft_len);
  const MatrixD fb = triangular_filterbank(cfg.n_bark_bands, static_cast<int>(power.rows()), cfg.fft_len,
                                           cfg.sample_rate, 0.0, cfg.fmax, hz_to_bark);
  return apply_log_filterbank(fb, power, cfg.log_floor);
}

VoicingTrack voicing(std::span<const double> clip, const VoicingConfig& cfg) {
  cfg.validate();
  if (clip.size() < static_cast<std::size_t>(cfg.frame_len)) {
    throw ShapeError("voicing: clip shorter than one analysis frame");
  }
  const std::size_t n = clip.size();
  const std::size_t hop = static_cast<std::size_t>(cfg.hop);
  const std::size_t half = static_cast<std::size_t>(cfg.frame_len) / 2;
  const std::size_t n_frames = n / hop + 1;
  const int min_lag = static_cast<int>(std::ceil(cfg.sample_rate / cfg.f0_max));
  const int max_lag = static_cast<int>(std::floor(cfg.sample_rate / cfg.f0_min));

  double clip_energy = 0.0;
  for (double x : clip) clip_energy += x * x;
  const double clip_rms = std::sqrt(clip_energy / n);

  std::size_t fft_len = 1;
  while (fft_len < 2 * static_cast<std::size_t>(cfg.frame_len)) fft_len *= 2;
  RealFft fft(fft_len);

  VoicingTrack track;
  track.frame_len = cfg.frame_len;
  track.frame_hop = cfg.hop;
  track.flags.assign(n_frames, false);
  track.f0.assign(n_frames, std::nullopt);

  std::vector<double> frame(fft_len), acf(fft_len), prefix;
  std::vector<std::complex<double>> spec(fft.bins());
  std::vector<double> r(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (std::size_t t = 0; t < n_frames; ++t) {
    const std::size_t centre = t * hop + hop / 2;
    const std::size_t begin = centre > half ? centre - half : 0;
    const std::size_t end = std::min(n, centre + half);
    if (end <= begin) continue;
    const std::size_t len = end - begin;

    double mean = 0.0, energy = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      mean += clip[i];
      energy += clip[i] * clip[i];
    }
    mean /= len;
    const double frame_rms = std::sqrt(energy / len);
    if (clip_rms <= 0.0 || frame_rms < cfg.energy_ratio * clip_rms || frame_rms == 0.0) continue;
    if (len <= static_cast<std::size_t>(max_lag)) continue;

    std::fill(frame.begin(), frame.end(), 0.0);
    for (std::size_t i = 0; i < len; ++i) frame[i] = clip[begin + i] - mean;
    prefix.assign(len + 1, 0.0);
    for (std::size_t i = 0; i < len; ++i) prefix[i + 1] = prefix[i] + frame[i] * frame[i];

    fft.forward(frame.data(), spec.data());
    for (auto& c : spec) c = std::norm(c);
    fft.inverse(spec.data(), acf.data());

    double best = -1.0;
    for (int lag = min_lag; lag <= max_lag; ++lag) {
      const std::size_t L = static_cast<std::size_t>(lag);
      const double head = prefix[len - L];
      const double tail = prefix[len] - prefix[L];
      const double denom = std::sqrt(head * tail);
      r[L] = denom > 0.0 ? acf[L] / (static_cast<double>(fft_len) * denom) : 0.0;
      best = std::max(best, r[L]);
    }
    if (best < cfg.peak_threshold) continue;
    track.flags[t] = true;
    // Shortest-lag local peak close to the global one guards against picking
    // a period multiple.
    int chosen = min_lag;
    for (int lag = min_lag; lag <= max_lag; ++lag) {
      const std::size_t L = static_cast<std::size_t>(lag);
      const bool left_ok = lag == min_lag || r[L] >= r[L - 1];
      const bool right_ok = lag == max_lag || r[L] >= r[L + 1];
      if (left_ok && right_ok && r[L] >= 0.9 * best) {
        chosen = lag;
        break;
      }
    }
    track.f0[t] = static_cast<double>(cfg.sample_rate) / chosen;
  }
  return track;
}

}  // namespace pdspeech
