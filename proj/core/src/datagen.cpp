#include "randomx/datagen.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "randomx/error.hpp"

namespace randomx {

namespace detail {
double upper_quantile_t_newton(double tail, double df);
}

CovariateModel CovariateModel::isotropic_normal(std::size_t p) {
  CovariateModel m;
  m.kind = Kind::IsotropicNormal;
  m.p = p;
  return m;
}

CovariateModel CovariateModel::normal_block(std::size_t p, std::size_t blocks, double rho) {
  CovariateModel m;
  m.kind = Kind::NormalBlock;
  m.p = p;
  m.blocks = blocks;
  m.rho = rho;
  return m;
}

CovariateModel CovariateModel::copula_uniform(std::size_t p, std::size_t blocks, double rho) {
  CovariateModel m = normal_block(p, blocks, rho);
  m.kind = Kind::CopulaUniform;
  return m;
}

CovariateModel CovariateModel::copula_t4(std::size_t p, std::size_t blocks, double rho) {
  CovariateModel m = normal_block(p, blocks, rho);
  m.kind = Kind::CopulaT4;
  return m;
}

CovariateModel CovariateModel::scaled_product(std::size_t p, BaseDistribution base,
                                              std::optional<Matrix> sigma_half) {
  CovariateModel m;
  m.kind = Kind::ScaledProduct;
  m.p = p;
  m.base = base;
  m.sigma_half = std::move(sigma_half);
  return m;
}

void CovariateModel::validate() const {
  if (p < 1) throw Error(ErrorCode::DomainError, "covariate model: p must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0))
    throw Error(ErrorCode::DomainError, "covariate model: rho must lie in [0, 1)");
  const bool blocked = kind == Kind::NormalBlock || kind == Kind::CopulaUniform || kind == Kind::CopulaT4;
  if (blocked && (blocks < 1 || blocks > p))
    throw Error(ErrorCode::DomainError, "covariate model: blocks must lie in [1, p]");
  if (kind == Kind::ScaledProduct && sigma_half) {
    if (sigma_half->rows() != p || sigma_half->cols() != p)
      throw Error(ErrorCode::DomainError, "covariate model: sigma_half must be p x p");
    if (!is_symmetric(*sigma_half))
      throw Error(ErrorCode::DomainError, "covariate model: sigma_half must be symmetric");
    try {
      Cholesky check(*sigma_half);
    } catch (const Error&) {
      throw Error(ErrorCode::DomainError, "covariate model: sigma_half must be positive definite");
    }
  }
}

double MeanModel::operator()(std::span<const double> x) const {
  switch (kind) {
    case Kind::Null:
      return 0.0;
    case Kind::LinearSum: {
      double s = 0.0;
      for (double v : x) s += v;
      return s;
    }
    case Kind::AbsSum: {
      double s = 0.0;
      for (double v : x) s += std::abs(v);
      return amplitude * s;
    }
    case Kind::LinearBeta: {
      double s = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) s += beta[j] * x[j];
      return s;
    }
  }
  return 0.0;
}

Vector MeanModel::evaluate(const Matrix& x) const {
  validate(x.cols());
  Vector out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = (*this)(x.row(i));
  return out;
}

void MeanModel::validate(std::size_t p) const {
  if (amplitude < 0.0) throw Error(ErrorCode::DomainError, "mean model: amplitude C must be >= 0");
  if (kind == Kind::LinearBeta && beta.size() != p)
    throw Error(ErrorCode::DomainError, "mean model: beta length must equal p");
}

std::vector<std::size_t> block_sizes(std::size_t p, std::size_t blocks) {
  if (blocks == 0 || blocks > p) throw Error(ErrorCode::DomainError, "block_sizes: need 1 <= blocks <= p");
  std::vector<std::size_t> sizes(blocks, p / blocks);
  for (std::size_t b = 0; b < p % blocks; ++b) ++sizes[b];
  return sizes;
}

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

namespace {

/// t such that P(T > t) = tail, for tail in (0, 1/2].
double upper_quantile_t(double tail, double df) {
  if (tail == 0.5) return 0.0;
  if (df == 1.0) return 1.0 / std::tan(std::numbers::pi * tail);
  if (df == 2.0) return (1.0 - 2.0 * tail) / std::sqrt(2.0 * tail * (1.0 - tail));
  if (df == 4.0) {
    const double root_alpha = std::sqrt(4.0 * tail * (1.0 - tail));
    return 2.0 * std::sqrt(std::cos(std::acos(root_alpha) / 3.0) / root_alpha - 1.0);
  }
  return detail::upper_quantile_t_newton(tail, df);
}

void fill_block_normal(std::span<double> row, std::span<const std::size_t> sizes, double rho,
                       Stream& stream) {
  const double shared = std::sqrt(rho);
  const double own = std::sqrt(1.0 - rho);
  std::size_t j = 0;
  for (std::size_t size : sizes) {
    const double common = rho > 0.0 ? shared * stream.normal() : 0.0;
    for (std::size_t k = 0; k < size; ++k, ++j) row[j] = common + own * stream.normal();
  }
}

double draw_base(BaseDistribution base, Stream& stream) {
  switch (base) {
    case BaseDistribution::Normal:
      return stream.normal();
    case BaseDistribution::Uniform:
      return std::numbers::sqrt3 * (2.0 * stream.uniform() - 1.0);
    case BaseDistribution::Rademacher:
      return (stream.next_u64() >> 63) ? 1.0 : -1.0;
  }
  return 0.0;
}

}  // namespace

namespace detail {

double upper_quantile_t_newton(double tail, double df) {
  // P(T > t) = I_{df/(df+t²)}(df/2, 1/2) / 2 for t >= 0.
  auto upper = [df](double t) { return 0.5 * boost::math::ibeta(0.5 * df, 0.5, df / (df + t * t)); };
  const double log_norm = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                          0.5 * std::log(df * std::numbers::pi);
  auto density = [&](double t) {
    return std::exp(log_norm - 0.5 * (df + 1.0) * std::log1p(t * t / df));
  };

  double lo = 0.0;
  double hi = 1.0;
  while (upper(hi) > tail) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) return std::numeric_limits<double>::infinity();
  }
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double g = upper(t) - tail;
    if (g == 0.0) return t;
    if (g > 0.0)
      lo = t;
    else
      hi = t;
    double next = t + g / density(t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * std::max(1.0, std::abs(t))) return next;
    t = next;
  }
  return t;
}

}  // namespace detail

double cdf_t(double t, double df) {
  if (!(df > 0.0)) throw Error(ErrorCode::DomainError, "cdf_t: df must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * boost::math::ibeta(0.5 * df, 0.5, df / (df + t * t));
  return t >= 0.0 ? 1.0 - tail : tail;
}

double quantile_t(double u, double df) {
  if (!(u > 0.0 && u < 1.0)) throw Error(ErrorCode::DomainError, "quantile_t: u must lie in (0, 1)");
  if (!(df > 0.0)) throw Error(ErrorCode::DomainError, "quantile_t: df must be positive");
  if (u == 0.5) return 0.0;
  return u > 0.5 ? upper_quantile_t(1.0 - u, df) : -upper_quantile_t(u, df);
}

Matrix draw_covariates(const CovariateModel& model, std::size_t n, Stream& stream) {
  model.validate();
  if (n < 1) throw Error(ErrorCode::DomainError, "draw_covariates: n must be >= 1");
  const std::size_t p = model.p;
  Matrix x(n, p);

  switch (model.kind) {
    case CovariateModel::Kind::IsotropicNormal:
      for (double& v : x.data()) v = stream.normal();
      break;
    case CovariateModel::Kind::NormalBlock:
    case CovariateModel::Kind::CopulaUniform:
    case CovariateModel::Kind::CopulaT4: {
      const auto sizes = block_sizes(p, model.blocks);
      for (std::size_t i = 0; i < n; ++i) {
        auto row = x.row(i);
        fill_block_normal(row, sizes, model.rho, stream);
        if (model.kind == CovariateModel::Kind::CopulaUniform) {
          for (double& v : row) v = normal_cdf(v);
        } else if (model.kind == CovariateModel::Kind::CopulaT4) {
          // Work from the smaller tail so extreme draws keep full precision.
          for (double& v : row) {
            const double tail = normal_cdf(-std::abs(v));
            const double q = upper_quantile_t(tail, 4.0);
            v = v >= 0.0 ? q : -q;
          }
        }
      }
      break;
    }
    case CovariateModel::Kind::ScaledProduct: {
      for (double& v : x.data()) v = draw_base(model.base, stream);
      if (model.sigma_half) x = multiply(x, *model.sigma_half);
      break;
    }
  }
  return x;
}

Response draw_response(const Matrix& x, const MeanModel& mean, const NoiseModel& noise, Stream& stream) {
  if (!(noise.sigma >= 0.0)) throw Error(ErrorCode::DomainError, "draw_response: sigma must be >= 0");
  Response r{Vector(x.rows()), mean.evaluate(x)};
  for (std::size_t i = 0; i < x.rows(); ++i) r.Y[i] = r.fX[i] + noise.sigma * stream.normal();
  return r;
}

TrainingSet draw_training_set(const CovariateModel& covariates, const MeanModel& mean,
                              const NoiseModel& noise, std::size_t n, Stream& x_stream,
                              Stream& noise_stream) {
  Matrix x = draw_covariates(covariates, n, x_stream);
  Response r = draw_response(x, mean, noise, noise_stream);
  return {std::move(x), std::move(r.Y), std::move(r.fX)};
}

}  // namespace randomx
