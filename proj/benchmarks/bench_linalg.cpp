#include <benchmark/benchmark.h>

#include "randomx/linalg.hpp"
#include "randomx/rng.hpp"

using namespace randomx;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Stream s(seed, 0, StreamPurpose::Auxiliary);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = s.normal();
  return m;
}

}  // namespace

static void BM_Gram(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const Matrix x = random_matrix(2 * p, p, 1);
  for (auto _ : state) benchmark::DoNotOptimize(gram(x));
}
BENCHMARK(BM_Gram)->Arg(10)->Arg(50)->Arg(200);

static void BM_Cholesky(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const Matrix a = gram(random_matrix(2 * p, p, 2));
  for (auto _ : state) {
    Cholesky c(a);
    benchmark::DoNotOptimize(c.lower());
  }
}
BENCHMARK(BM_Cholesky)->Arg(10)->Arg(50)->Arg(200);

static void BM_HatDiagonal(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const Matrix x = random_matrix(2 * p, p, 3);
  for (auto _ : state) benchmark::DoNotOptimize(hat_diagonal(x, 0.0));
}
BENCHMARK(BM_HatDiagonal)->Arg(10)->Arg(50);

static void BM_SymmetricEigen(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const Matrix a = gram(random_matrix(2 * p, p, 4));
  for (auto _ : state) benchmark::DoNotOptimize(symmetric_eigen(a));
}
BENCHMARK(BM_SymmetricEigen)->Arg(10)->Arg(50);
