#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "randomx/linalg.hpp"
#include "randomx/rng.hpp"

namespace randomx {

/// Marginal law of the i.i.d. entries z used by ScaledProduct covariates.
/// All choices have mean 0 and variance 1.
enum class BaseDistribution { Normal, Uniform, Rademacher };

struct CovariateModel {
  enum class Kind { IsotropicNormal, NormalBlock, CopulaUniform, CopulaT4, ScaledProduct };

  Kind kind = Kind::IsotropicNormal;
  std::size_t p = 1;
  std::size_t blocks = 1;  // NormalBlock and both copulas
  double rho = 0.0;        // within-block correlation
  BaseDistribution base = BaseDistribution::Normal;
  std::optional<Matrix> sigma_half;  // ScaledProduct; identity when absent

  static CovariateModel isotropic_normal(std::size_t p);
  static CovariateModel normal_block(std::size_t p, std::size_t blocks, double rho);
  static CovariateModel copula_uniform(std::size_t p, std::size_t blocks, double rho);
  static CovariateModel copula_t4(std::size_t p, std::size_t blocks, double rho);
  static CovariateModel scaled_product(std::size_t p, BaseDistribution base,
                                       std::optional<Matrix> sigma_half = std::nullopt);

  /// Throws DomainError when an invariant is violated.
  void validate() const;
};

struct MeanModel {
  enum class Kind { LinearSum, AbsSum, Null, LinearBeta };

  Kind kind = Kind::Null;
  double amplitude = 0.0;  // C in C·Σ|x_j|
  Vector beta;             // LinearBeta

  static MeanModel linear_sum() { return {Kind::LinearSum, 0.0, {}}; }
  static MeanModel abs_sum(double amplitude) { return {Kind::AbsSum, amplitude, {}}; }
  static MeanModel null() { return {Kind::Null, 0.0, {}}; }
  static MeanModel linear_beta(Vector beta) { return {Kind::LinearBeta, 0.0, std::move(beta)}; }

  double operator()(std::span<const double> x) const;
  Vector evaluate(const Matrix& x) const;
  void validate(std::size_t p) const;
};

struct NoiseModel {
  double sigma = 1.0;

  double variance() const noexcept { return sigma * sigma; }
};

struct TrainingSet {
  Matrix X;
  Vector Y;
  Vector fX;

  std::size_t n() const noexcept { return X.rows(); }
  std::size_t p() const noexcept { return X.cols(); }
};

/// Block sizes for `p` variables split into `blocks` groups; the first
/// p mod blocks groups carry one extra variable.
std::vector<std::size_t> block_sizes(std::size_t p, std::size_t blocks);

Matrix draw_covariates(const CovariateModel& model, std::size_t n, Stream& stream);

struct Response {
  Vector Y;
  Vector fX;
};

Response draw_response(const Matrix& x, const MeanModel& mean, const NoiseModel& noise, Stream& stream);

TrainingSet draw_training_set(const CovariateModel& covariates, const MeanModel& mean,
                              const NoiseModel& noise, std::size_t n, Stream& x_stream,
                              Stream& noise_stream);

/// Standard normal CDF.
double normal_cdf(double z) noexcept;

/// Student-t quantile: returns q with CDF(q; df) = u. Newton iterations on the
/// incomplete-beta CDF, safeguarded by bisection; df = 1, 2, 4 use closed forms.
double quantile_t(double u, double df);

/// Student-t CDF via the regularized incomplete beta function.
double cdf_t(double t, double df);

}  // namespace randomx
