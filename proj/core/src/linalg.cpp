#include "randomx/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "randomx/error.hpp"

namespace randomx {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::ShapeMismatch, what);
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  require(data_.size() == rows_ * cols_, "Matrix: entry count does not match rows*cols");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, "Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

void KahanSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    carry_ += (sum_ - t) + x;
  else
    carry_ += (x - t) + sum_;
  sum_ = t;
}

double sum(std::span<const double> v) noexcept {
  KahanSum s;
  for (double x : v) s += x;
  return s.value();
}

double mean(std::span<const double> v) noexcept {
  return v.empty() ? 0.0 : sum(v) / static_cast<double>(v.size());
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  KahanSum s;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s.value();
}

double squared_norm(std::span<const double> v) noexcept { return dot(v, v); }

double frobenius_norm(const Matrix& a) noexcept { return std::sqrt(squared_norm(a.data())); }

Matrix multiply(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "multiply: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix multiply_at_b(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "multiply_at_b: row counts differ");
  Matrix c(a.cols(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto arow = a.row(r);
    auto brow = b.row(r);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double ai = arow[i];
      if (ai == 0.0) continue;
      auto out = c.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += ai * brow[j];
    }
  }
  return c;
}

Vector multiply(const Matrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), "multiply: vector length differs from cols");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

Vector multiply_transposed(const Matrix& a, std::span<const double> x) {
  require(a.rows() == x.size(), "multiply_transposed: vector length differs from rows");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) y[j] += r[j] * x[i];
  }
  return y;
}

Matrix gram(const Matrix& x, double ridge) {
  const std::size_t p = x.cols();
  Matrix g(p, p);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto xr = x.row(r);
    for (std::size_t i = 0; i < p; ++i) {
      const double xi = xr[i];
      if (xi == 0.0) continue;
      auto out = g.row(i);
      for (std::size_t j = i; j < p; ++j) out[j] += xi * xr[j];
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    g(i, i) += ridge;
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  }
  return g;
}

double trace(const Matrix& a) {
  require(a.rows() == a.cols(), "trace: matrix is not square");
  KahanSum s;
  for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, i);
  return s.value();
}

bool is_symmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  double scale = 0.0;
  for (double v : a.data()) scale = std::max(scale, std::abs(v));
  const double bound = tol * std::max(scale, 1.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(a(i, j) - a(j, i)) > bound) return false;
  return true;
}

Cholesky::Cholesky(const Matrix& a) : l_(a.rows(), a.cols()) {
  require(a.rows() == a.cols(), "Cholesky: matrix is not square");
  if (!is_symmetric(a)) throw Error(ErrorCode::DomainError, "Cholesky: matrix is not symmetric");
  const std::size_t n = a.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a(i, i));
  const double tol = 1e-10 * max_diag;

  for (std::size_t j = 0; j < n; ++j) {
    auto lj = l_.row(j);
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= lj[k] * lj[k];
    if (!(d > tol)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "Cholesky pivot " + std::to_string(j) + " is " + std::to_string(d) +
                      " (tolerance " + std::to_string(tol) + ")");
    }
    const double ljj = std::sqrt(d);
    lj[j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      auto li = l_.row(i);
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      li[j] = s / ljj;
    }
  }
}

void Cholesky::forward_in_place(std::span<double> b) const {
  const std::size_t n = size();
  require(b.size() == n, "Cholesky: rhs length mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    auto li = l_.row(i);
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * b[k];
    b[i] = s / li[i];
  }
}

void Cholesky::backward_in_place(std::span<double> b) const {
  const std::size_t n = size();
  require(b.size() == n, "Cholesky: rhs length mismatch");
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l_(k, ii) * b[k];
    b[ii] = s / l_(ii, ii);
  }
}

Vector Cholesky::solve(std::span<const double> b) const {
  Vector x(b.begin(), b.end());
  forward_in_place(x);
  backward_in_place(x);
  return x;
}

Matrix Cholesky::forward(const Matrix& b) const {
  const std::size_t n = size();
  require(b.rows() == n, "Cholesky: rhs row count mismatch");
  Matrix w = b;
  for (std::size_t i = 0; i < n; ++i) {
    auto wi = w.row(i);
    auto li = l_.row(i);
    for (std::size_t k = 0; k < i; ++k) {
      const double lik = li[k];
      if (lik == 0.0) continue;
      auto wk = w.row(k);
      for (std::size_t c = 0; c < wi.size(); ++c) wi[c] -= lik * wk[c];
    }
    const double inv = 1.0 / li[i];
    for (double& v : wi) v *= inv;
  }
  return w;
}

Matrix Cholesky::solve(const Matrix& b) const {
  Matrix w = forward(b);
  const std::size_t n = size();
  for (std::size_t ii = n; ii-- > 0;) {
    auto wi = w.row(ii);
    for (std::size_t k = ii + 1; k < n; ++k) {
      const double lki = l_(k, ii);
      if (lki == 0.0) continue;
      auto wk = w.row(k);
      for (std::size_t c = 0; c < wi.size(); ++c) wi[c] -= lki * wk[c];
    }
    const double inv = 1.0 / l_(ii, ii);
    for (double& v : wi) v *= inv;
  }
  return w;
}

Matrix Cholesky::inverse() const { return solve(Matrix::identity(size())); }

Vector solve_spd(const Matrix& a, std::span<const double> b) {
  require(a.rows() == b.size(), "solve_spd: dimensions do not conform");
  return Cholesky(a).solve(b);
}

Vector hat_diagonal(const Matrix& x, double ridge) {
  if (ridge < 0.0) throw Error(ErrorCode::DomainError, "hat_diagonal: ridge must be nonnegative");
  const Matrix a = gram(x, ridge);
  std::optional<Cholesky> chol;
  try {
    chol.emplace(a);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotPositiveDefinite && ridge == 0.0)
      throw Error(ErrorCode::RankDeficient, "hat_diagonal: X does not have full column rank");
    throw;
  }
  const Matrix w = chol->forward(x.transpose());
  Vector h(x.rows(), 0.0);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    auto wi = w.row(i);
    for (std::size_t j = 0; j < wi.size(); ++j) h[j] += wi[j] * wi[j];
  }
  return h;
}

EigenDecomposition symmetric_eigen(const Matrix& input) {
  if (!is_symmetric(input)) throw Error(ErrorCode::DomainError, "symmetric_eigen: matrix is not symmetric");
  const std::size_t n = input.rows();
  Matrix a = input;
  Matrix v = Matrix::identity(n);

  const double norm = frobenius_norm(a);
  const double tol = 1e-12 * (norm > 0.0 ? norm : 1.0);
  auto off_norm = [&] {
    KahanSum s;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s.value());
  };

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps && off_norm() > tol; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = a(p, p);
        const double aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = a(p, r) = arp - s * (arq + tau * arp);
          a(r, q) = a(q, r) = arq + s * (arp - tau * arq);
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }
  if (off_norm() > tol)
    throw Error(ErrorCode::NoConvergence, "symmetric_eigen: no convergence after 100 sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenDecomposition out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

}  // namespace randomx
