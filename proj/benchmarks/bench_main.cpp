#include <benchmark/benchmark.h>

#include "tryon/ag/nn.hpp"
#include "tryon/core/bilinear.hpp"
#include "tryon/core/rng.hpp"

using namespace tryon;

static void BM_BilinearSample(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  Raster map(n, n, 3);
  for (auto& v : map.data) v = static_cast<float>(rng.uniform());
  Raster coords(n, n, 2);
  for (auto& v : coords.data) v = static_cast<float>(rng.uniform(0.0, n - 1.0));
  for (auto _ : state) {
    auto out = bilinear_sample(map, coords);
    benchmark::DoNotOptimize(out.data.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_BilinearSample)->Arg(64)->Arg(128)->Arg(256);

static void BM_Conv2dForward(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  Rng rng(2);
  auto x = ag::constant(ag::Tensor<float>::randn({1, c, 32, 32}, rng));
  auto w = ag::constant(ag::Tensor<float>::randn({c, c, 3, 3}, rng, 0.1f));
  auto b = ag::constant(ag::Tensor<float>::zeros({c}));
  for (auto _ : state) {
    auto out = ag::conv2d(x, w, b, 1, 1);
    benchmark::DoNotOptimize(out.value().data());
  }
  state.SetItemsProcessed(state.iterations() * 2ll * c * c * 9 * 32 * 32);
}
BENCHMARK(BM_Conv2dForward)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
