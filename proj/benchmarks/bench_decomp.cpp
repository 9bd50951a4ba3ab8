#include <benchmark/benchmark.h>

#include "randomx/datagen.hpp"
#include "randomx/decomp.hpp"
#include "randomx/rng.hpp"

using namespace randomx;

namespace {

struct Fixture {
  Matrix x, x0;
  Vector fx, fx0;
};

Fixture make(std::size_t n, std::size_t p) {
  const auto model = CovariateModel::isotropic_normal(p);
  const auto mean = MeanModel::abs_sum(1.0);
  Stream a(7, 0, StreamPurpose::TrainCovariates), b(7, 0, StreamPurpose::TestCovariates);
  Fixture f{draw_covariates(model, n, a), draw_covariates(model, n, b), {}, {}};
  f.fx = mean.evaluate(f.x);
  f.fx0 = mean.evaluate(f.x0);
  return f;
}

}  // namespace

static void BM_MomentsLeastSquares(benchmark::State& state) {
  const auto f = make(100, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(conditional_moments_ls(f.x, f.x0, f.fx, f.fx0, 1.0));
}
BENCHMARK(BM_MomentsLeastSquares)->Arg(10)->Arg(50);

static void BM_MomentsRidge(benchmark::State& state) {
  const auto f = make(100, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(conditional_moments_ridge(f.x, f.x0, f.fx, f.fx0, 1.0, 5.0));
}
BENCHMARK(BM_MomentsRidge)->Arg(10)->Arg(50);

static void BM_MomentsKnn(benchmark::State& state) {
  const auto f = make(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(conditional_moments_knn(f.x, f.x0, f.fx, f.fx0, 1.0, 5));
}
BENCHMARK(BM_MomentsKnn)->Arg(100)->Arg(400);

BENCHMARK_MAIN();
