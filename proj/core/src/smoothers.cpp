#include "randomx/smoothers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "randomx/error.hpp"

namespace randomx {

namespace {

void require_shape(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::ShapeMismatch, what);
}

/// Cholesky of XᵀX + λI, with rank loss reported in regression terms.
Cholesky factor_normal_equations(const Matrix& x, double lambda) {
  try {
    return Cholesky(gram(x, lambda));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotPositiveDefinite)
      throw Error(ErrorCode::RankDeficient,
                  "XᵀX + λI is singular (λ = " + std::to_string(lambda) + "); X lacks full column rank");
    throw;
  }
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

double resolve_bandwidth(const KernelSpec& kernel, const Matrix& x) {
  if (kernel.kind != KernelSpec::Kind::Gaussian) return 0.0;
  if (kernel.bandwidth > 0.0) return kernel.bandwidth;
  const double h = median_pairwise_distance(x);
  return h > 0.0 ? h : 1.0;
}

std::vector<std::size_t> nearest(const Matrix& x, std::span<const double> query, std::size_t k,
                                 std::optional<std::size_t> exclude) {
  std::vector<std::pair<double, std::size_t>> cand;
  cand.reserve(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (exclude && *exclude == i) continue;
    cand.emplace_back(squared_distance(x.row(i), query), i);
  }
  const std::size_t take = std::min(k, cand.size());
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end());
  std::vector<std::size_t> out(take);
  for (std::size_t j = 0; j < take; ++j) out[j] = cand[j].second;
  return out;
}

Matrix knn_weights(const std::vector<std::vector<std::size_t>>& sets, std::size_t n, std::size_t k) {
  Matrix w(sets.size(), n);
  const double share = 1.0 / static_cast<double>(k);
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j : sets[i]) w(i, j) += share;
  return w;
}

}  // namespace

void SmootherSpec::validate() const {
  if (!(lambda >= 0.0)) throw Error(ErrorCode::DomainError, "smoother: lambda must be >= 0");
  if (kind == Kind::KernelRidge && !(lambda > 0.0))
    throw Error(ErrorCode::DomainError, "smoother: kernel ridge requires lambda > 0");
  if (kind == Kind::Knn && k < 1) throw Error(ErrorCode::DomainError, "smoother: k must be >= 1");
  if (kernel.bandwidth < 0.0) throw Error(ErrorCode::DomainError, "smoother: bandwidth must be >= 0");
}

double median_pairwise_distance(const Matrix& x) {
  std::vector<double> d;
  const std::size_t n = x.rows();
  if (n < 2) return 0.0;
  d.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d.push_back(std::sqrt(squared_distance(x.row(i), x.row(j))));
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  const double upper = d[mid];
  if (d.size() % 2 == 1) return upper;
  const double lower = *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

Matrix kernel_matrix(const KernelSpec& kernel, double bandwidth, const Matrix& a, const Matrix& b) {
  require_shape(a.cols() == b.cols(), "kernel_matrix: column counts differ");
  Matrix k(a.rows(), b.rows());
  if (kernel.kind == KernelSpec::Kind::Linear) {
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < b.rows(); ++j) {
        double s = 0.0;
        auto ai = a.row(i);
        auto bj = b.row(j);
        for (std::size_t c = 0; c < ai.size(); ++c) s += ai[c] * bj[c];
        k(i, j) = s;
      }
    return k;
  }
  const double scale = -0.5 / (bandwidth * bandwidth);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) k(i, j) = std::exp(scale * squared_distance(a.row(i), b.row(j)));
  return k;
}

std::vector<std::vector<std::size_t>> neighbor_sets(const Matrix& x, const Matrix& x0, std::size_t k) {
  require_shape(x.cols() == x0.cols(), "neighbor_sets: column counts differ");
  if (k < 1 || k > x.rows())
    throw Error(ErrorCode::DegenerateNeighbors, "neighbor_sets: need 1 <= k <= n");
  std::vector<std::vector<std::size_t>> sets(x0.rows());
  for (std::size_t i = 0; i < x0.rows(); ++i) sets[i] = nearest(x, x0.row(i), k, std::nullopt);
  return sets;
}

std::vector<std::vector<std::size_t>> self_neighbor_sets(const Matrix& x, std::size_t k) {
  if (k < 1 || k > x.rows())
    throw Error(ErrorCode::DegenerateNeighbors, "self_neighbor_sets: need 1 <= k <= n");
  std::vector<std::vector<std::size_t>> sets(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto others = nearest(x, x.row(i), k - 1, i);
    sets[i].reserve(k);
    sets[i].push_back(i);
    sets[i].insert(sets[i].end(), others.begin(), others.end());
  }
  return sets;
}

FittedSmoother fit(const SmootherSpec& spec, const Matrix& x, std::span<const double> y) {
  spec.validate();
  require_shape(x.rows() == y.size(), "fit: X rows differ from length of Y");
  const std::size_t n = x.rows();

  FittedSmoother out;
  out.spec = spec;
  out.train_X = x;

  switch (spec.kind) {
    case SmootherSpec::Kind::LeastSquares:
    case SmootherSpec::Kind::Ridge: {
      const double lambda = spec.kind == SmootherSpec::Kind::LeastSquares ? 0.0 : spec.lambda;
      const Cholesky chol = factor_normal_equations(x, lambda);
      out.coefficients = chol.solve(multiply_transposed(x, y));
      out.fitted = multiply(x, out.coefficients);
      const Matrix w = chol.forward(x.transpose());
      out.hat_diag.assign(n, 0.0);
      for (std::size_t i = 0; i < w.rows(); ++i) {
        auto wi = w.row(i);
        for (std::size_t j = 0; j < n; ++j) out.hat_diag[j] += wi[j] * wi[j];
      }
      break;
    }
    case SmootherSpec::Kind::KernelRidge: {
      out.bandwidth = resolve_bandwidth(spec.kernel, x);
      const Matrix k = kernel_matrix(spec.kernel, out.bandwidth, x, x);
      Matrix a = k;
      for (std::size_t i = 0; i < n; ++i) a(i, i) += spec.lambda;
      const Cholesky chol(a);
      out.coefficients = chol.solve(y);
      out.fitted = multiply(k, out.coefficients);
      // S = K(K+λI)⁻¹ = I − λ(K+λI)⁻¹, and diag((K+λI)⁻¹) = column norms of L⁻¹.
      const Matrix linv = chol.forward(Matrix::identity(n));
      out.hat_diag.assign(n, 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        auto li = linv.row(i);
        for (std::size_t j = 0; j < n; ++j) out.hat_diag[j] -= spec.lambda * li[j] * li[j];
      }
      break;
    }
    case SmootherSpec::Kind::Knn: {
      if (spec.k > n)
        throw Error(ErrorCode::DegenerateNeighbors,
                    "kNN: k = " + std::to_string(spec.k) + " exceeds n = " + std::to_string(n));
      out.coefficients.assign(y.begin(), y.end());
      const auto sets = self_neighbor_sets(x, spec.k);
      out.fitted.assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        KahanSum s;
        for (std::size_t j : sets[i]) s += y[j];
        out.fitted[i] = s.value() / static_cast<double>(spec.k);
      }
      out.hat_diag.assign(n, 1.0 / static_cast<double>(spec.k));
      break;
    }
  }
  out.trace_S = sum(out.hat_diag);
  return out;
}

FittedSmoother fit(const SmootherSpec& spec, const TrainingSet& data) { return fit(spec, data.X, data.Y); }

Vector predict(const FittedSmoother& model, const Matrix& x0) {
  require_shape(x0.cols() == model.p(), "predict: X0 column count differs from training p");
  switch (model.spec.kind) {
    case SmootherSpec::Kind::LeastSquares:
    case SmootherSpec::Kind::Ridge:
      return multiply(x0, model.coefficients);
    case SmootherSpec::Kind::KernelRidge:
      return multiply(kernel_matrix(model.spec.kernel, model.bandwidth, x0, model.train_X), model.coefficients);
    case SmootherSpec::Kind::Knn: {
      const auto sets = neighbor_sets(model.train_X, x0, model.spec.k);
      Vector out(x0.rows());
      for (std::size_t i = 0; i < sets.size(); ++i) {
        KahanSum s;
        for (std::size_t j : sets[i]) s += model.coefficients[j];
        out[i] = s.value() / static_cast<double>(model.spec.k);
      }
      return out;
    }
  }
  return {};
}

namespace {

Matrix weights_impl(const SmootherSpec& spec, const Matrix& x, const Matrix& x0, bool in_sample) {
  spec.validate();
  require_shape(x.cols() == x0.cols(), "smoother_weights: column counts differ");
  const std::size_t n = x.rows();
  switch (spec.kind) {
    case SmootherSpec::Kind::LeastSquares:
    case SmootherSpec::Kind::Ridge: {
      const double lambda = spec.kind == SmootherSpec::Kind::LeastSquares ? 0.0 : spec.lambda;
      const Cholesky chol = factor_normal_equations(x, lambda);
      const Matrix w = chol.forward(x.transpose());
      const Matrix w0 = in_sample ? w : chol.forward(x0.transpose());
      return multiply_at_b(w0, w);
    }
    case SmootherSpec::Kind::KernelRidge: {
      const double h = resolve_bandwidth(spec.kernel, x);
      Matrix a = kernel_matrix(spec.kernel, h, x, x);
      for (std::size_t i = 0; i < n; ++i) a(i, i) += spec.lambda;
      const Cholesky chol(a);
      // W = K0 (K+λI)⁻¹ = ((K+λI)⁻¹ K0ᵀ)ᵀ
      return chol.solve(kernel_matrix(spec.kernel, h, x, x0)).transpose();
    }
    case SmootherSpec::Kind::Knn: {
      if (spec.k > n) throw Error(ErrorCode::DegenerateNeighbors, "kNN: k exceeds n");
      return knn_weights(in_sample ? self_neighbor_sets(x, spec.k) : neighbor_sets(x, x0, spec.k), n, spec.k);
    }
  }
  return {};
}

}  // namespace

Matrix smoother_weights(const SmootherSpec& spec, const Matrix& x, const Matrix& x0) {
  return weights_impl(spec, x, x0, false);
}

Matrix smoother_matrix(const SmootherSpec& spec, const Matrix& x) { return weights_impl(spec, x, x, true); }

}  // namespace randomx
