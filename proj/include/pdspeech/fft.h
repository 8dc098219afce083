// include/pdspeech/fft.h

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

#ifndef PDSPEECH_FFT_H_
#define PDSPEECH_FFT_H_

#include <complex>
#include <cstddef>

namespace pdspeech {

struct FftPlans;

// Real-input FFT of a fixed length backed by FFTW. Plans are created once per
// length (under a lock) and shared; execute() is safe from many threads.
class RealFft {
 public:
  explicit RealFft(std::size_t n);

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  // in: size() samples, out: bins() values. Buffers may alias nothing else.
  void forward(const double* in, std::complex<double>* out) const;
  // Unnormalized inverse: inverse(forward(x)) == size() * x.
  void inverse(const std::complex<double>* in, double* out) const;

 private:
  std::size_t n_;
  const FftPlans* plans_;
};

}  // namespace pdspeech

#endif  // PDSPEECH_FFT_H_
