// include/pdspeech/dsp.h

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

#ifndef PDSPEECH_DSP_H_
#define PDSPEECH_DSP_H_

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "pdspeech/common.h"

namespace pdspeech {

// STFT / Mel front end for the CNN input. Defaults give 16 ms windows, 4 ms
// hops and 256 one-sided bins (Nyquist dropped from a 512-point FFT).
struct SpectrogramConfig {
  int sample_rate = 16000;
  int window_len = 256;
  int hop = 64;
  int fft_len = 512;
  int n_mels = 80;
  double fmin = 0.0;
  double fmax = 8000.0;
  double log_floor = 1e-10;

  int n_bins() const { return fft_len / 2; }
  void validate() const;
  bool operator==(const SpectrogramConfig&) const = default;
};

struct MelSpectrogram {
  MatrixD values;  // n_mels x n_frames, natural-log energies
  SpectrogramConfig config;
};

// Frame-level cepstral/Bark front end used by the SVM baseline.
struct MfccConfig {
  int sample_rate = 16000;
  int n_coeffs = 12;
  int n_mel_filters = 26;
  int n_bark_bands = 22;
  int delta_window = 2;
  int frame_len = 400;
  int hop = 160;
  int fft_len = 512;
  double fmax = 8000.0;
  double log_floor = 1e-10;

  void validate() const;
  bool operator==(const MfccConfig&) const = default;
};

struct VoicingConfig {
  int sample_rate = 16000;
  int frame_len = 512;  // 32 ms
  int hop = 160;        // 10 ms
  double f0_min = 75.0;
  double f0_max = 400.0;
  double peak_threshold = 0.45;
  // Frame RMS must reach this fraction of the clip RMS.
  double energy_ratio = 0.01;

  void validate() const;
  bool operator==(const VoicingConfig&) const = default;
};

// Frame t stands for the hop interval [t * frame_hop, (t + 1) * frame_hop);
// its analysis window is centred on that interval. The interval start is the
// frame's anchor and is what boundary positions refer to.
struct VoicingTrack {
  std::vector<bool> flags;
  int frame_len = 0;
  int frame_hop = 0;
  std::vector<std::optional<double>> f0;

  std::size_t anchor(std::size_t frame) const { return frame * static_cast<std::size_t>(frame_hop); }
};

void to_json(nlohmann::json& j, const SpectrogramConfig& c);
void from_json(const nlohmann::json& j, SpectrogramConfig& c);
void to_json(nlohmann::json& j, const MfccConfig& c);
void from_json(const nlohmann::json& j, MfccConfig& c);
void to_json(nlohmann::json& j, const VoicingConfig& c);
void from_json(const nlohmann::json& j, VoicingConfig& c);

double hz_to_mel(double hz);
double mel_to_hz(double mel);
// Traunmueller approximation.
double hz_to_bark(double hz);
double bark_to_hz(double bark);

// Periodic Hann window of length n.
std::vector<double> hann(int n);

// Triangular filters whose edge/centre points are uniform on the given warped
// scale between lo_hz and hi_hz. Weights are triangles in the warped domain,
// peak 1. Returns n_filters x n_bins where bin k sits at k * sample_rate / fft_len.
MatrixD triangular_filterbank(int n_filters, int n_bins, int fft_len, int sample_rate,
                              double lo_hz, double hi_hz, double (*to_scale)(double));

// Centred STFT: reflect-padded by window_len/2 on each side, Hann window,
// frame t starts at t*hop in the padded signal. Returns n_bins x n_frames
// with n_frames = floor(N/hop) + 1.
Matrix<std::complex<double>> stft(std::span<const double> clip, const SpectrogramConfig& cfg);

MatrixD mel_filterbank(const SpectrogramConfig& cfg);
MelSpectrogram mel_spectrogram(std::span<const double> clip, const SpectrogramConfig& cfg);
// Same, with a precomputed filterbank.
MelSpectrogram mel_spectrogram(std::span<const double> clip, const SpectrogramConfig& cfg,
                               const MatrixD& filterbank);

// Power spectra of non-centred frames: (fft_len/2 + 1) x n_frames with
// n_frames = floor((N - frame_len)/hop) + 1.
MatrixD frame_power_spectra(std::span<const double> clip, int frame_len, int hop, int fft_len);

// Coefficients 1..n_coeffs of the orthonormal DCT-II of log Mel energies.
MatrixD mfcc(std::span<const double> clip, const MfccConfig& cfg);
// The log Mel energies that mfcc() transforms; n_mel_filters x n_frames.
MatrixD mfcc_log_mel(std::span<const double> clip, const MfccConfig& cfg);

// Regression deltas with clamped edges.
MatrixD deltas(const MatrixD& features, int window);

MatrixD bark_energies(std::span<const double> clip, const MfccConfig& cfg);

VoicingTrack voicing(std::span<const double> clip, const VoicingConfig& cfg = {});

}  // namespace pdspeech

#endif  // PDSPEECH_DSP_H_
