#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "randomx/error.hpp"
#include "randomx/linalg.hpp"

using namespace randomx;

namespace {

Matrix random_spd(std::size_t n, std::uint64_t seed) {
  const Matrix z = oracle::random_matrix(n + 5, n, seed);
  return gram(z, 0.1);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace

TEST(Matrix, ConstructionAndAccess) {
  const Matrix a{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(a.rows(), 2u);
  EXPECT_EQ(a.cols(), 3u);
  EXPECT_EQ(a(1, 2), 6.0);
  EXPECT_EQ(a.row(1)[0], 4.0);
  EXPECT_EQ(a.transpose(), (Matrix{{1, 4}, {2, 5}, {3, 6}}));
  EXPECT_THROW(Matrix(2, 2, std::vector<double>{1, 2, 3}), Error);
}

TEST(Matrix, ProductsAgreeWithNaiveOracle) {
  const Matrix a = oracle::random_matrix(7, 4, 1);
  const Matrix b = oracle::random_matrix(4, 5, 2);
  EXPECT_LT(max_abs_diff(multiply(a, b), oracle::product(a, b)), 1e-12);
  const Matrix c = oracle::random_matrix(7, 3, 3);
  EXPECT_LT(max_abs_diff(multiply_at_b(a, c), oracle::product(oracle::transpose(a), c)), 1e-12);
  const auto v = oracle::random_vector(4, 4);
  const Vector av = multiply(a, v);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(av[i], dot(a.row(i), v), 1e-14);
  const auto w = oracle::random_vector(7, 5);
  const Vector atw = multiply_transposed(a, w);
  const Vector direct = multiply(a.transpose(), w);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(atw[j], direct[j], 1e-12);
}

TEST(Matrix, GramAddsRidgeToDiagonal) {
  const Matrix x{{1, 2}, {3, 4}, {5, 6}};
  const Matrix g = gram(x, 2.0);
  EXPECT_EQ(g, (Matrix{{35 + 2, 44}, {44, 56 + 2}}));
  EXPECT_DOUBLE_EQ(trace(g), 95.0);
  EXPECT_TRUE(is_symmetric(g));
  EXPECT_FALSE(is_symmetric(Matrix{{1, 2}, {2.1, 1}}));
}

TEST(KahanSum, RecoversLowOrderBits) {
  KahanSum s;
  s += 1e16;
  for (int i = 0; i < 1000; ++i) s += 1.0;
  s += -1e16;
  EXPECT_DOUBLE_EQ(s.value(), 1000.0);
  const std::vector<double> v{0.1, 0.2, 0.3};
  EXPECT_NEAR(sum(v), 0.6, 1e-16);
  EXPECT_NEAR(mean(v), 0.2, 1e-16);
}

TEST(SolveSpd, IdentityReturnsRightHandSide) {
  const Vector x = solve_spd(Matrix::identity(3), std::vector<double>{1, 2, 3});
  EXPECT_EQ(x, (Vector{1, 2, 3}));
}

TEST(SolveSpd, DiagonalSystem) {
  const Vector x = solve_spd(Matrix{{2, 0}, {0, 4}}, std::vector<double>{2, 8});
  EXPECT_DOUBLE_EQ(x[0], 1.0);
  EXPECT_DOUBLE_EQ(x[1], 2.0);
}

TEST(SolveSpd, TwoByTwoGramInverse) {
  const Vector x = solve_spd(Matrix{{5, 7}, {7, 13}}, std::vector<double>{1, 0});
  EXPECT_NEAR(x[0], 13.0 / 16.0, 1e-14);
  EXPECT_NEAR(x[1], -7.0 / 16.0, 1e-14);
}

TEST(SolveSpd, ResidualSmallOnRandomSystems) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t n = 3 + seed % 17;
    const Matrix a = random_spd(n, seed);
    const auto b = oracle::random_vector(n, seed + 100);
    const Vector x = solve_spd(a, b);
    const Vector ax = multiply(a, x);
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) num += (ax[i] - b[i]) * (ax[i] - b[i]);
    EXPECT_LE(std::sqrt(num / squared_norm(b)), 1e-8) << "seed " << seed;
  }
}

TEST(Cholesky, RejectsIndefiniteAndSingular) {
  try {
    Cholesky c(Matrix{{1, 2}, {2, 1}});
    FAIL() << "expected NotPositiveDefinite";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPositiveDefinite);
  }
  EXPECT_THROW(Cholesky(Matrix{{1, 1}, {1, 1}}), Error);
  try {
    Cholesky c(Matrix{{1, 2}, {0, 1}});
    FAIL() << "expected DomainError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainError);
  }
}

TEST(Cholesky, FactorReconstructsAndInverts) {
  const Matrix a = random_spd(9, 7);
  const Cholesky c(a);
  const Matrix& l = c.lower();
  EXPECT_LT(max_abs_diff(multiply(l, l.transpose()), a), 1e-10);
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = i + 1; j < 9; ++j) EXPECT_EQ(l(i, j), 0.0);
  EXPECT_LT(max_abs_diff(c.inverse(), oracle::inverse(a)), 1e-10);
  const Matrix b = oracle::random_matrix(9, 4, 8);
  EXPECT_LT(max_abs_diff(multiply(a, c.solve(b)), b), 1e-9);
  const Matrix f = c.forward(b);
  EXPECT_LT(max_abs_diff(multiply(l, f), b), 1e-10);
}

TEST(HatDiagonal, IdentityDesign) {
  const Vector h = hat_diagonal(Matrix::identity(2), 0.0);
  EXPECT_NEAR(h[0], 1.0, 1e-14);
  EXPECT_NEAR(h[1], 1.0, 1e-14);
}

TEST(HatDiagonal, SingleColumn) {
  const Vector h = hat_diagonal(Matrix{{1}, {2}}, 0.0);
  EXPECT_NEAR(h[0], 0.2, 1e-14);
  EXPECT_NEAR(h[1], 0.8, 1e-14);
}

TEST(HatDiagonal, SingleColumnRidge) {
  const Vector h = hat_diagonal(Matrix{{1}, {2}}, 5.0);
  EXPECT_NEAR(h[0], 0.1, 1e-14);
  EXPECT_NEAR(h[1], 0.4, 1e-14);
}

TEST(HatDiagonal, RankDeficientDesign) {
  const Matrix x{{1, 2}, {2, 4}, {3, 6}};
  try {
    hat_diagonal(x, 0.0);
    FAIL() << "expected RankDeficient";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
  }
  EXPECT_NO_THROW(hat_diagonal(x, 1.0));
}

TEST(HatDiagonal, TraceEqualsRankAndEntriesInUnitInterval) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const std::size_t p = 1 + seed % 8;
    const Matrix x = oracle::random_matrix(30, p, seed);
    const Vector h = hat_diagonal(x, 0.0);
    EXPECT_NEAR(sum(h), static_cast<double>(p), 1e-8);
    for (double v : h) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(HatDiagonal, NonincreasingInLambda) {
  const Matrix x = oracle::random_matrix(25, 6, 42);
  Vector prev = hat_diagonal(x, 0.0);
  for (double lambda : {1.0, 10.0, 100.0}) {
    const Vector h = hat_diagonal(x, lambda);
    for (std::size_t i = 0; i < h.size(); ++i) EXPECT_LE(h[i], prev[i] + 1e-15);
    prev = h;
  }
}

TEST(HatDiagonal, MatchesExplicitInverseOracle) {
  const Matrix x = oracle::random_matrix(20, 4, 9);
  for (double lambda : {0.0, 3.0}) {
    Matrix a = oracle::product(oracle::transpose(x), x);
    for (std::size_t i = 0; i < 4; ++i) a(i, i) += lambda;
    const Matrix s = oracle::product(oracle::product(x, oracle::inverse(a)), oracle::transpose(x));
    const Vector h = hat_diagonal(x, lambda);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(h[i], s(i, i), 1e-12);
  }
}

TEST(SymmetricEigen, Diagonal) {
  const auto e = symmetric_eigen(Matrix{{1, 0}, {0, 3}});
  EXPECT_NEAR(e.eigenvalues[0], 3.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues[1], 1.0, 1e-14);
}

TEST(SymmetricEigen, Swap) {
  const auto e = symmetric_eigen(Matrix{{0, 1}, {1, 0}});
  EXPECT_NEAR(e.eigenvalues[0], 1.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues[1], -1.0, 1e-14);
}

TEST(SymmetricEigen, QuadraticCharacteristicPolynomial) {
  const auto e = symmetric_eigen(Matrix{{5, 7}, {7, 13}});
  EXPECT_NEAR(e.eigenvalues[0], 9.0 + std::sqrt(65.0), 1e-12);
  EXPECT_NEAR(e.eigenvalues[1], 9.0 - std::sqrt(65.0), 1e-12);
}

TEST(SymmetricEigen, ReconstructionAndOrthonormality) {
  for (std::uint64_t seed : {3u, 5u, 11u}) {
    const Matrix z = oracle::random_matrix(40, 40, seed);
    Matrix a(40, 40);
    for (std::size_t i = 0; i < 40; ++i)
      for (std::size_t j = 0; j < 40; ++j) a(i, j) = z(i, j) + z(j, i);
    const auto e = symmetric_eigen(a);
    const Matrix& u = e.eigenvectors;
    const Matrix rebuilt = multiply(multiply(u, Matrix::diagonal(e.eigenvalues)), u.transpose());
    Matrix diff = rebuilt;
    for (std::size_t i = 0; i < diff.data().size(); ++i) diff.data()[i] -= a.data()[i];
    EXPECT_LE(frobenius_norm(diff) / frobenius_norm(a), 1e-10);
    const Matrix utu = multiply_at_b(u, u);
    EXPECT_LT(max_abs_diff(utu, Matrix::identity(40)), 1e-10);
    for (std::size_t i = 1; i < 40; ++i) EXPECT_GE(e.eigenvalues[i - 1], e.eigenvalues[i]);
  }
}

TEST(SymmetricEigen, RejectsNonSymmetricInput) {
  EXPECT_THROW(symmetric_eigen(Matrix{{1, 2}, {3, 4}}), Error);
}
