#pragma once

// Least squares, ridge, kernel ridge and kNN regression behind one linear
// smoother interface: f̂(x) = s(x)ᵀY.

#include <cstddef>
#include <vector>

#include "randomx/datagen.hpp"
#include "randomx/linalg.hpp"

namespace randomx {

struct KernelSpec {
  enum class Kind { Gaussian, Linear };

  Kind kind = Kind::Gaussian;
  /// Gaussian bandwidth h in exp(-‖x−z‖² / (2h²)). Zero selects the median
  /// pairwise training distance at fit time.
  double bandwidth = 0.0;
};

struct SmootherSpec {
  enum class Kind { LeastSquares, Ridge, KernelRidge, Knn };

  Kind kind = Kind::LeastSquares;
  double lambda = 0.0;
  KernelSpec kernel{};
  std::size_t k = 1;

  static SmootherSpec least_squares() { return {}; }
  static SmootherSpec ridge(double lambda) { return {Kind::Ridge, lambda, {}, 1}; }
  static SmootherSpec kernel_ridge(double lambda, KernelSpec kernel = {}) {
    return {Kind::KernelRidge, lambda, kernel, 1};
  }
  static SmootherSpec knn(std::size_t k) { return {Kind::Knn, 0.0, {}, k}; }

  void validate() const;
};

struct FittedSmoother {
  SmootherSpec spec;
  Matrix train_X;
  /// Primal β for LeastSquares/Ridge, dual weights α for KernelRidge, the
  /// training responses for Knn.
  Vector coefficients;
  Vector fitted;
  Vector hat_diag;
  double trace_S = 0.0;
  /// Resolved Gaussian bandwidth (KernelRidge only).
  double bandwidth = 0.0;

  std::size_t n() const noexcept { return train_X.rows(); }
  std::size_t p() const noexcept { return train_X.cols(); }
};

FittedSmoother fit(const SmootherSpec& spec, const Matrix& x, std::span<const double> y);
FittedSmoother fit(const SmootherSpec& spec, const TrainingSet& data);

Vector predict(const FittedSmoother& model, const Matrix& x0);

/// Rows s(x0_j)ᵀ of the smoother, so that predict(model, x0) = W·Y.
/// Depends only on the training covariates, never on Y.
Matrix smoother_weights(const SmootherSpec& spec, const Matrix& x, const Matrix& x0);
/// In-sample smoother matrix S(X).
Matrix smoother_matrix(const SmootherSpec& spec, const Matrix& x);

/// For each row of x0, the indices of the k nearest rows of x under Euclidean
/// distance, ordered by (distance, index).
std::vector<std::vector<std::size_t>> neighbor_sets(const Matrix& x, const Matrix& x0, std::size_t k);

/// In-sample neighbourhoods: every point leads its own set, followed by its
/// k−1 nearest other training points.
std::vector<std::vector<std::size_t>> self_neighbor_sets(const Matrix& x, std::size_t k);

/// Gram matrix between the rows of a and b under the given kernel.
Matrix kernel_matrix(const KernelSpec& kernel, double bandwidth, const Matrix& a, const Matrix& b);
double median_pairwise_distance(const Matrix& x);

}  // namespace randomx
