// Serial reference vs OpenMP kernels at model-sized and larger shapes.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sceneptp/kernels.hpp"

namespace k = sceneptp::kernels;

namespace {

std::vector<float> random_vec(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<float> d(-1.0f, 1.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

template <bool Parallel>
void BM_Gemm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const k::GemmShape s{n, n, n};
  const auto a = random_vec(n * n, 1), b = random_vec(n * n, 2);
  std::vector<float> c(n * n);
  for (auto _ : state) {
    if constexpr (Parallel)
      k::parallel::gemm(s, a.data(), b.data(), c.data());
    else
      k::serial::gemm(s, a.data(), b.data(), c.data());
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * 2 * n * n * n));
}

template <bool Parallel>
void BM_Conv2d(benchmark::State& state) {
  const auto hw = static_cast<std::size_t>(state.range(0));
  const k::Conv2dShape s{1, 16, 32, hw, hw, 3, 2, 1};
  const auto x = random_vec(16 * hw * hw, 3), w = random_vec(32 * 16 * 9, 4), bias = random_vec(32, 5);
  std::vector<float> y(32 * s.out_height() * s.out_width());
  for (auto _ : state) {
    if constexpr (Parallel)
      k::parallel::conv2d_forward(s, x.data(), w.data(), bias.data(), y.data());
    else
      k::serial::conv2d_forward(s, x.data(), w.data(), bias.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
}

template <bool Parallel>
void BM_Conv1d(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const k::Conv1dShape s{batch, 64, 64, 8, 3, 2, true};
  const auto x = random_vec(batch * 64 * 8, 6), w = random_vec(64 * 64 * 3, 7), bias = random_vec(64, 8);
  std::vector<float> y(batch * 64 * 8);
  for (auto _ : state) {
    if constexpr (Parallel)
      k::parallel::conv1d_forward(s, x.data(), w.data(), bias.data(), y.data());
    else
      k::serial::conv1d_forward(s, x.data(), w.data(), bias.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
}

}  // namespace

BENCHMARK(BM_Gemm<false>)->Name("gemm/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_Gemm<true>)->Name("gemm/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_Conv2d<false>)->Name("conv2d/serial")->Arg(32)->Arg(128);
BENCHMARK(BM_Conv2d<true>)->Name("conv2d/parallel")->Arg(32)->Arg(128);
BENCHMARK(BM_Conv1d<false>)->Name("conv1d/serial")->Arg(4)->Arg(64);
BENCHMARK(BM_Conv1d<true>)->Name("conv1d/parallel")->Arg(4)->Arg(64);

BENCHMARK_MAIN();
