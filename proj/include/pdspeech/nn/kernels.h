// include/pdspeech/nn/kernels.h

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

#ifndef PDSPEECH_NN_KERNELS_H_
#define PDSPEECH_NN_KERNELS_H_

// Layer kernels in two flavours. serial:: is the plain reference; parallel::
// splits independent loops across OpenMP threads. Every output element is
// produced by one thread with the same summation order as the serial kernel,
// so both give bit-identical results.
//
// Convolutions go through an im2col buffer of (in_c * 9) x (h * w) so every
// inner loop runs over a whole contiguous plane.

#include <algorithm>
#include <cstddef>
#include <vector>

namespace pdspeech::nn {

struct ConvDims {
  std::size_t in_c = 0, out_c = 0, h = 0, w = 0;  // 3x3 kernel, stride 1, pad 1
  std::size_t plane() const { return h * w; }
  std::size_t taps() const { return in_c * 9; }
  std::size_t weight_count() const { return out_c * in_c * 9; }
};

namespace detail {

// Dot product with eight interleaved partial sums combined in a fixed order.
template <typename T>
inline T dot(const T* a, const T* b, std::size_t n) {
  T acc[8] = {};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (int l = 0; l < 8; ++l) acc[l] += a[i + l] * b[i + l];
  }
  T tail = 0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

template <typename T>
inline T sum(const T* a, std::size_t n) {
  T acc[8] = {};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (int l = 0; l < 8; ++l) acc[l] += a[i + l];
  }
  T tail = 0;
  for (; i < n; ++i) tail += a[i];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

// Rows c*9 .. c*9+8 of the im2col buffer: input plane c shifted by each tap.
template <typename T>
inline void im2col_channel(const ConvDims& d, const T* in, T* cols, std::size_t c) {
  const std::size_t h = d.h, w = d.w;
  const T* src = in + c * d.plane();
  for (int ky = 0; ky < 3; ++ky) {
    for (int kx = 0; kx < 3; ++kx) {
      T* dst = cols + (c * 9 + static_cast<std::size_t>(ky * 3 + kx)) * d.plane();
      for (std::size_t y = 0; y < h; ++y) {
        const long sy = static_cast<long>(y) + ky - 1;
        T* row = dst + y * w;
        if (sy < 0 || sy >= static_cast<long>(h)) {
          std::fill(row, row + w, T{});
          continue;
        }
        const T* s = src + static_cast<std::size_t>(sy) * w;
        for (std::size_t x = 0; x < w; ++x) {
          const long sx = static_cast<long>(x) + kx - 1;
          row[x] = (sx < 0 || sx >= static_cast<long>(w)) ? T{} : s[sx];
        }
      }
    }
  }
}

// Adds the nine shifted gradient rows of channel c back onto its input plane.
template <typename T>
inline void col2im_channel(const ConvDims& d, const T* gcols, T* g_in, std::size_t c) {
  const std::size_t h = d.h, w = d.w;
  T* dst = g_in + c * d.plane();
  std::fill(dst, dst + d.plane(), T{});
  for (int ky = 0; ky < 3; ++ky) {
    for (int kx = 0; kx < 3; ++kx) {
      const T* src = gcols + (c * 9 + static_cast<std::size_t>(ky * 3 + kx)) * d.plane();
      for (std::size_t y = 0; y < h; ++y) {
        const long sy = static_cast<long>(y) + ky - 1;
        if (sy < 0 || sy >= static_cast<long>(h)) continue;
        T* drow = dst + static_cast<std::size_t>(sy) * w;
        const T* srow = src + y * w;
        const std::size_t x0 = kx == 0 ? 1 : 0;
        const std::size_t x1 = kx == 2 ? w - 1 : w;
        for (std::size_t x = x0; x < x1; ++x) drow[x + kx - 1] += srow[x];
      }
    }
  }
}

template <typename T>
inline void conv_forward_channel(const ConvDims& d, const T* cols, const T* weights, const T* bias, T* out,
                                 std::size_t o) {
  const std::size_t p = d.plane();
  T* dst = out + o * p;
  std::fill(dst, dst + p, bias[o]);
  const T* wrow = weights + o * d.taps();
  for (std::size_t k = 0; k < d.taps(); ++k) {
    const T wv = wrow[k];
    const T* src = cols + k * p;
    for (std::size_t i = 0; i < p; ++i) dst[i] += wv * src[i];
  }
}

template <typename T>
inline void conv_weight_grad_channel(const ConvDims& d, const T* cols, const T* g_out, T* g_weights,
                                     T* g_bias, std::size_t o) {
  const std::size_t p = d.plane();
  const T* g = g_out + o * p;
  g_bias[o] += sum(g, p);
  T* gw = g_weights + o * d.taps();
  for (std::size_t k = 0; k < d.taps(); ++k) gw[k] += dot(g, cols + k * p, p);
}

// Row k of the im2col gradient: sum over output channels of w[o][k] * g_out[o].
template <typename T>
inline void conv_cols_grad_row(const ConvDims& d, const T* weights, const T* g_out, T* gcols, std::size_t k) {
  const std::size_t p = d.plane();
  T* dst = gcols + k * p;
  std::fill(dst, dst + p, T{});
  for (std::size_t o = 0; o < d.out_c; ++o) {
    const T wv = weights[o * d.taps() + k];
    const T* g = g_out + o * p;
    for (std::size_t i = 0; i < p; ++i) dst[i] += wv * g[i];
  }
}

// Work below this many multiply-adds stays on the calling thread.
inline constexpr std::size_t kParallelThreshold = 1u << 15;

}  // namespace detail

namespace serial {

template <typename T>
void conv2d_forward(const ConvDims& d, const T* in, const T* weights, const T* bias, T* out) {
  std::vector<T> cols(d.taps() * d.plane());
  for (std::size_t c = 0; c < d.in_c; ++c) detail::im2col_channel(d, in, cols.data(), c);
  for (std::size_t o = 0; o < d.out_c; ++o) detail::conv_forward_channel(d, cols.data(), weights, bias, out, o);
}

// Accumulates into g_weights/g_bias; g_in (if non-null) is overwritten.
template <typename T>
void conv2d_backward(const ConvDims& d, const T* in, const T* weights, const T* g_out, T* g_weights,
                     T* g_bias, T* g_in) {
  std::vector<T> cols(d.taps() * d.plane());
  for (std::size_t c = 0; c < d.in_c; ++c) detail::im2col_channel(d, in, cols.data(), c);
  for (std::size_t o = 0; o < d.out_c; ++o) {
    detail::conv_weight_grad_channel(d, cols.data(), g_out, g_weights, g_bias, o);
  }
  if (g_in) {
    for (std::size_t k = 0; k < d.taps(); ++k) detail::conv_cols_grad_row(d, weights, g_out, cols.data(), k);
    for (std::size_t c = 0; c < d.in_c; ++c) detail::col2im_channel(d, cols.data(), g_in, c);
  }
}

template <typename T>
void dense_forward(std::size_t n_in, std::size_t n_out, const T* in, const T* weights, const T* bias,
                   T* out) {
  for (std::size_t m = 0; m < n_out; ++m) out[m] = bias[m] + detail::dot(weights + m * n_in, in, n_in);
}

template <typename T>
void dense_backward(std::size_t n_in, std::size_t n_out, const T* in, const T* weights, const T* g_out,
                    T* g_weights, T* g_bias, T* g_in) {
  for (std::size_t m = 0; m < n_out; ++m) {
    T* grow = g_weights + m * n_in;
    const T g = g_out[m];
    g_bias[m] += g;
    for (std::size_t n = 0; n < n_in; ++n) grow[n] += g * in[n];
  }
  if (g_in) {
    std::fill(g_in, g_in + n_in, T{});
    for (std::size_t m = 0; m < n_out; ++m) {
      const T* row = weights + m * n_in;
      const T g = g_out[m];
      for (std::size_t n = 0; n < n_in; ++n) g_in[n] += row[n] * g;
    }
  }
}

}  // namespace serial

namespace parallel {

template <typename T>
void conv2d_forward(const ConvDims& d, const T* in, const T* weights, const T* bias, T* out) {
  const bool big = d.weight_count() * d.plane() >= detail::kParallelThreshold;
  std::vector<T> cols(d.taps() * d.plane());
#pragma omp parallel if (big)
  {
#pragma omp for schedule(static)
    for (long c = 0; c < static_cast<long>(d.in_c); ++c) {
      detail::im2col_channel(d, in, cols.data(), static_cast<std::size_t>(c));
    }
#pragma omp for schedule(static)
    for (long o = 0; o < static_cast<long>(d.out_c); ++o) {
      detail::conv_forward_channel(d, cols.data(), weights, bias, out, static_cast<std::size_t>(o));
    }
  }
}

template <typename T>
void conv2d_backward(const ConvDims& d, const T* in, const T* weights, const T* g_out, T* g_weights,
                     T* g_bias, T* g_in) {
  const bool big = d.weight_count() * d.plane() >= detail::kParallelThreshold;
  std::vector<T> cols(d.taps() * d.plane());
#pragma omp parallel if (big)
  {
#pragma omp for schedule(static)
    for (long c = 0; c < static_cast<long>(d.in_c); ++c) {
      detail::im2col_channel(d, in, cols.data(), static_cast<std::size_t>(c));
    }
#pragma omp for schedule(static)
    for (long o = 0; o < static_cast<long>(d.out_c); ++o) {
      detail::conv_weight_grad_channel(d, cols.data(), g_out, g_weights, g_bias, static_cast<std::size_t>(o));
    }
    if (g_in) {
#pragma omp for schedule(static)
      for (long k = 0; k < static_cast<long>(d.taps()); ++k) {
        detail::conv_cols_grad_row(d, weights, g_out, cols.data(), static_cast<std::size_t>(k));
      }
#pragma omp for schedule(static)
      for (long c = 0; c < static_cast<long>(d.in_c); ++c) {
        detail::col2im_channel(d, cols.data(), g_in, static_cast<std::size_t>(c));
      }
    }
  }
}

template <typename T>
void dense_forward(std::size_t n_in, std::size_t n_out, const T* in, const T* weights, const T* bias,
                   T* out) {
  const bool big = n_in * n_out >= detail::kParallelThreshold;
#pragma omp parallel for schedule(static) if (big)
  for (long m = 0; m < static_cast<long>(n_out); ++m) {
    out[m] = bias[m] + detail::dot(weights + static_cast<std::size_t>(m) * n_in, in, n_in);
  }
}

template <typename T>
void dense_backward(std::size_t n_in, std::size_t n_out, const T* in, const T* weights, const T* g_out,
                    T* g_weights, T* g_bias, T* g_in) {
  const bool big = n_in * n_out >= detail::kParallelThreshold;
#pragma omp parallel if (big)
  {
#pragma omp for schedule(static)
    for (long m = 0; m < static_cast<long>(n_out); ++m) {
      T* grow = g_weights + static_cast<std::size_t>(m) * n_in;
      const T g = g_out[m];
      g_bias[m] += g;
      for (std::size_t n = 0; n < n_in; ++n) grow[n] += g * in[n];
    }
    if (g_in) {
      // Each thread owns a slice of g_in and keeps the serial m-order.
#pragma omp for schedule(static)
      for (long n = 0; n < static_cast<long>(n_in); ++n) {
        T acc = 0;
        for (std::size_t m = 0; m < n_out; ++m) acc += weights[m * n_in + static_cast<std::size_t>(n)] * g_out[m];
        g_in[n] = acc;
      }
    }
  }
}

}  // namespace parallel

}  // namespace pdspeech::nn

#endif  // PDSPEECH_NN_KERNELS_H_
