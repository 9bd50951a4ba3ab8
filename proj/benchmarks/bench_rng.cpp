#include <benchmark/benchmark.h>

#include "randomx/datagen.hpp"
#include "randomx/rng.hpp"

using namespace randomx;

static void BM_PhiloxBlock(benchmark::State& state) {
  Philox4x32::Counter ctr{0, 0, 0, 0};
  const Philox4x32::Key key{0x12345678u, 0x9abcdef0u};
  for (auto _ : state) {
    ctr = Philox4x32::generate(ctr, key);
    benchmark::DoNotOptimize(ctr);
  }
  state.SetItemsProcessed(state.iterations() * 4);
}
BENCHMARK(BM_PhiloxBlock);

static void BM_StreamNormal(benchmark::State& state) {
  Stream s(20161101, 0, StreamPurpose::Auxiliary);
  for (auto _ : state) benchmark::DoNotOptimize(s.normal());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StreamNormal);

static void BM_DrawCovariates(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const auto model = CovariateModel::normal_block(p, 5, 0.9);
  Stream s(1, 0, StreamPurpose::TrainCovariates);
  for (auto _ : state) benchmark::DoNotOptimize(draw_covariates(model, 100, s));
}
BENCHMARK(BM_DrawCovariates)->Arg(10)->Arg(50);
