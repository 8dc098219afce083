// bench/bench_kernels.cc

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

// Serial vs OpenMP layer kernels on the CNN's layer sizes.

#include <vector>

#include <benchmark/benchmark.h>

#include "pdspeech/common.h"
#include "pdspeech/nn/kernels.h"

namespace {

using pdspeech::Rng;
using pdspeech::nn::ConvDims;

std::vector<float> random_floats(std::size_t n, Rng& rng) {
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0));
  return v;
}

// Arg index -> conv block of the default network.
ConvDims conv_block(long i) {
  static const ConvDims blocks[] = {{1, 4, 80, 41}, {4, 8, 40, 20}, {8, 16, 20, 10}, {16, 32, 10, 5}};
  return blocks[i];
}

template <bool Parallel>
void BM_ConvForward(benchmark::State& state) {
  const ConvDims d = conv_block(state.range(0));
  Rng rng(1);
  const auto in = random_floats(d.in_c * d.plane(), rng), w = random_floats(d.weight_count(), rng),
             b = random_floats(d.out_c, rng);
  std::vector<float> out(d.out_c * d.plane());
  for (auto _ : state) {
    if constexpr (Parallel) {
      pdspeech::nn::parallel::conv2d_forward(d, in.data(), w.data(), b.data(), out.data());
    } else {
      pdspeech::nn::serial::conv2d_forward(d, in.data(), w.data(), b.data(), out.data());
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(d.weight_count() * d.plane()));
}

template <bool Parallel>
void BM_ConvBackward(benchmark::State& state) {
  const ConvDims d = conv_block(state.range(0));
  Rng rng(2);
  const auto in = random_floats(d.in_c * d.plane(), rng), w = random_floats(d.weight_count(), rng),
             g = random_floats(d.out_c * d.plane(), rng);
  std::vector<float> gw(d.weight_count()), gb(d.out_c), gi(d.in_c * d.plane());
  for (auto _ : state) {
    if constexpr (Parallel) {
      pdspeech::nn::parallel::conv2d_backward(d, in.data(), w.data(), g.data(), gw.data(), gb.data(), gi.data());
    } else {
      pdspeech::nn::serial::conv2d_backward(d, in.data(), w.data(), g.data(), gw.data(), gb.data(), gi.data());
    }
    benchmark::DoNotOptimize(gi.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(2 * d.weight_count() * d.plane()));
}

template <bool Parallel>
void BM_Dense(benchmark::State& state) {
  const std::size_t n_in = static_cast<std::size_t>(state.range(0)), n_out = static_cast<std::size_t>(state.range(1));
  Rng rng(3);
  const auto x = random_floats(n_in, rng), w = random_floats(n_in * n_out, rng), b = random_floats(n_out, rng),
             g = random_floats(n_out, rng);
  std::vector<float> y(n_out), gw(n_in * n_out), gb(n_out), gx(n_in);
  for (auto _ : state) {
    if constexpr (Parallel) {
      pdspeech::nn::parallel::dense_forward(n_in, n_out, x.data(), w.data(), b.data(), y.data());
      pdspeech::nn::parallel::dense_backward(n_in, n_out, x.data(), w.data(), g.data(), gw.data(), gb.data(), gx.data());
    } else {
      pdspeech::nn::serial::dense_forward(n_in, n_out, x.data(), w.data(), b.data(), y.data());
      pdspeech::nn::serial::dense_backward(n_in, n_out, x.data(), w.data(), g.data(), gw.data(), gb.data(), gx.data());
    }
    benchmark::DoNotOptimize(gx.data());
  }
}

BENCHMARK(BM_ConvForward<false>)->Name("conv_forward/serial")->DenseRange(0, 3);
BENCHMARK(BM_ConvForward<true>)->Name("conv_forward/parallel")->DenseRange(0, 3)->UseRealTime();
BENCHMARK(BM_ConvBackward<false>)->Name("conv_backward/serial")->DenseRange(0, 3);
BENCHMARK(BM_ConvBackward<true>)->Name("conv_backward/parallel")->DenseRange(0, 3)->UseRealTime();
BENCHMARK(BM_Dense<false>)->Name("dense/serial")->Args({320, 128})->Args({128, 64});
BENCHMARK(BM_Dense<true>)->Name("dense/parallel")->Args({320, 128})->Args({128, 64})->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
