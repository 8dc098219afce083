// src/fft.cc

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

#include "pdspeech/fft.h"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "pdspeech/common.h"

namespace pdspeech {

struct FftPlans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  ~FftPlans() {
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const FftPlans* plans_for(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<FftPlans>> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto& slot = cache[n];
  if (!slot) {
    const int len = static_cast<int>(n);
    std::vector<double> real(n);
    auto* cpx = fftw_alloc_complex(n / 2 + 1);
    auto plans = std::make_unique<FftPlans>();
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans->r2c = fftw_plan_dft_r2c_1d(len, real.data(), cpx, flags);
    plans->c2r = fftw_plan_dft_c2r_1d(len, cpx, real.data(), flags | FFTW_PRESERVE_INPUT);
    fftw_free(cpx);
    if (!plans->r2c || !plans->c2r) throw Error("FFTW planning failed for length " + std::to_string(n));
    slot = std::move(plans);
  }
  return slot.get();
}

}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n < 2) throw ConfigError("FFT length must be >= 2");
  plans_ = plans_for(n);
}

void RealFft::forward(const double* in, std::complex<double>* out) const {
  // r2c plans preserve their input by default for out-of-place transforms.
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

void RealFft::inverse(const std::complex<double>* in, double* out) const {
  fftw_execute_dft_c2r(plans_->c2r,
                       reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                       out);
}

}  // namespace pdspeech
