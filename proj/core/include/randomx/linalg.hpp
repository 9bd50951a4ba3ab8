#pragma once

// Small dense linear-algebra substrate: row-major matrices, a Cholesky
// factorization for XᵀX + λI systems, cyclic Jacobi for symmetric
// eigenproblems, and hat-matrix diagonals.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace randomx {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Matrix transpose() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Neumaier-compensated accumulator.
class KahanSum {
 public:
  void add(double x) noexcept;
  KahanSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double sum(std::span<const double> v) noexcept;
double mean(std::span<const double> v) noexcept;
double dot(std::span<const double> a, std::span<const double> b) noexcept;
double squared_norm(std::span<const double> v) noexcept;
double frobenius_norm(const Matrix& a) noexcept;

Matrix multiply(const Matrix& a, const Matrix& b);
/// AᵀB without forming the transpose.
Matrix multiply_at_b(const Matrix& a, const Matrix& b);
Vector multiply(const Matrix& a, std::span<const double> x);
Vector multiply_transposed(const Matrix& a, std::span<const double> x);
/// XᵀX + λI.
Matrix gram(const Matrix& x, double ridge = 0.0);
double trace(const Matrix& a);
bool is_symmetric(const Matrix& a, double tol = 1e-10);

/// Lower-triangular Cholesky factor A = LLᵀ of a symmetric positive-definite
/// matrix. Pivots at or below 1e-10·max(diag A) are treated as rank loss.
class Cholesky {
 public:
  explicit Cholesky(const Matrix& a);

  std::size_t size() const noexcept { return l_.rows(); }
  const Matrix& lower() const noexcept { return l_; }

  Vector solve(std::span<const double> b) const;
  /// Solves A X = B column by column.
  Matrix solve(const Matrix& b) const;
  /// L⁻¹ B, i.e. forward substitution applied to every column of B.
  Matrix forward(const Matrix& b) const;
  void forward_in_place(std::span<double> b) const;
  void backward_in_place(std::span<double> b) const;
  Matrix inverse() const;

 private:
  Matrix l_;
};

Vector solve_spd(const Matrix& a, std::span<const double> b);

/// diag(X (XᵀX + λI)⁻¹ Xᵀ). Throws RankDeficient when λ = 0 and X lacks full
/// column rank.
Vector hat_diagonal(const Matrix& x, double ridge);

struct EigenDecomposition {
  Vector eigenvalues;  // descending
  Matrix eigenvectors; // column j pairs with eigenvalues[j]
};

/// Cyclic Jacobi. Converges when the off-diagonal Frobenius norm drops below
/// 1e-12·‖A‖_F; gives up with NoConvergence after 100 sweeps.
EigenDecomposition symmetric_eigen(const Matrix& a);

}  // namespace randomx
