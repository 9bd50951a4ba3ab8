#include "randomx/criteria.hpp"

#include <cmath>
#include <string>

#include "randomx/error.hpp"

namespace randomx {

namespace {

constexpr double kLeverageCeiling = 1.0 - 1e-12;

void require_p_below(double p, double bound, const char* who) {
  if (!(p < bound))
    throw Error(ErrorCode::DimensionError,
                std::string(who) + ": requires p < " + std::to_string(bound) + ", got p = " + std::to_string(p));
}

void check_leverage(std::span<const double> residuals, std::span<const double> hat_diag, const char* who) {
  if (residuals.size() != hat_diag.size())
    throw Error(ErrorCode::ShapeMismatch, std::string(who) + ": residual and leverage lengths differ");
  if (residuals.empty()) throw Error(ErrorCode::DimensionError, std::string(who) + ": no observations");
  for (std::size_t i = 0; i < hat_diag.size(); ++i)
    if (!(hat_diag[i] < kLeverageCeiling))
      throw Error(ErrorCode::LeverageOne,
                  std::string(who) + ": observation " + std::to_string(i) + " has leverage " +
                      std::to_string(hat_diag[i]));
}

double excess_variance_factor(std::size_t n, double p) {
  const double nn = static_cast<double>(n);
  return (p + 1.0) / (nn - p - 1.0);
}

}  // namespace

double cp(double rss, std::size_t n, double p, double sigma2) {
  const double nn = static_cast<double>(n);
  require_p_below(p, nn, "cp");
  return rss / nn + 2.0 * sigma2 * p / nn;
}

double rcp(double rss, std::size_t n, double p, double sigma2) {
  const double nn = static_cast<double>(n);
  require_p_below(p, nn - 1.0, "rcp");
  return rss / nn + sigma2 * p / nn * (2.0 + excess_variance_factor(n, p));
}

double rcp_hat(double rss, std::size_t n, double p) {
  const double nn = static_cast<double>(n);
  require_p_below(p, nn - 1.0, "rcp_hat");
  return rss * (nn - 1.0) / ((nn - p) * (nn - p - 1.0));
}

double rcp_hat_plugin(double rss, std::size_t n, double p) {
  const double nn = static_cast<double>(n);
  require_p_below(p, nn - 1.0, "rcp_hat");
  const double sigma2_hat = rss / (nn - p);
  return rss / nn + sigma2_hat * p / nn * (2.0 + excess_variance_factor(n, p));
}

double gcv(double rss, std::size_t n, double p) {
  const double nn = static_cast<double>(n);
  require_p_below(p, nn, "gcv");
  const double shrink = 1.0 - p / nn;
  return rss / (nn * shrink * shrink);
}

double ocv(std::span<const double> residuals, std::span<const double> hat_diag) {
  check_leverage(residuals, hat_diag, "ocv");
  KahanSum s;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    const double loo = residuals[i] / (1.0 - hat_diag[i]);
    s += loo * loo;
  }
  return s.value() / static_cast<double>(residuals.size());
}

double bplus_hat(std::span<const double> residuals, std::span<const double> hat_diag, double sigma2) {
  check_leverage(residuals, hat_diag, "bplus_hat");
  KahanSum s;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    const double keep = 1.0 - hat_diag[i];
    const double r2 = residuals[i] * residuals[i];
    s += (r2 - keep * sigma2) * (1.0 / (keep * keep) - 1.0);
  }
  return s.value() / static_cast<double>(residuals.size());
}

double rcp_plus(double rcp_value, double bplus_hat_value) { return rcp_value + bplus_hat_value; }

double rcp_plus_from_ocv(double ocv_value, std::span<const double> hat_diag, double p, double sigma2) {
  const std::size_t n = hat_diag.size();
  const double nn = static_cast<double>(n);
  require_p_below(p, nn - 1.0, "rcp_plus");
  KahanSum s;
  for (double h : hat_diag) {
    if (!(h < kLeverageCeiling)) throw Error(ErrorCode::LeverageOne, "rcp_plus: leverage of one");
    s += h / (1.0 - h);
  }
  return ocv_value - sigma2 / nn * s.value() + sigma2 * p / nn * (1.0 + excess_variance_factor(n, p));
}

double vplus_normal_exact(std::size_t n, double p, double sigma2) {
  const double nn = static_cast<double>(n);
  require_p_below(p, nn - 1.0, "vplus_normal_exact");
  return sigma2 * p / nn * excess_variance_factor(n, p);
}

double vplus_asymptotic(double gamma, double sigma2) {
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw Error(ErrorCode::DomainError, "vplus_asymptotic: gamma must lie in [0, 1)");
  return sigma2 * gamma * gamma / (1.0 - gamma);
}

double optr_asymptotic(double gamma, double sigma2) {
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw Error(ErrorCode::DomainError, "optr_asymptotic: gamma must lie in [0, 1)");
  return sigma2 * gamma * (2.0 - gamma) / (1.0 - gamma);
}

double model_dimension(const FittedSmoother& fit) {
  if (fit.spec.kind == SmootherSpec::Kind::LeastSquares) return static_cast<double>(fit.p());
  return fit.trace_S;
}

CriteriaReport evaluate_criteria(const FittedSmoother& fit, std::span<const double> y,
                                 std::optional<double> sigma2) {
  if (y.size() != fit.fitted.size())
    throw Error(ErrorCode::ShapeMismatch, "evaluate_criteria: Y length differs from the fit");
  if (sigma2 && !(*sigma2 >= 0.0)) throw Error(ErrorCode::DomainError, "evaluate_criteria: sigma2 must be >= 0");

  CriteriaReport r;
  r.n = y.size();
  r.p = model_dimension(fit);
  r.sigma2 = sigma2;
  const double nn = static_cast<double>(r.n);

  Vector residuals(r.n);
  for (std::size_t i = 0; i < r.n; ++i) residuals[i] = y[i] - fit.fitted[i];
  r.rss = squared_norm(residuals);

  bool leverage_ok = true;
  for (double h : fit.hat_diag) leverage_ok = leverage_ok && h < kLeverageCeiling;

  if (r.p < nn) {
    r.sigma2_hat = r.rss / (nn - r.p);
    r.gcv = gcv(r.rss, r.n, r.p);
  }
  if (r.p < nn - 1.0) r.rcp_hat = rcp_hat(r.rss, r.n, r.p);
  if (leverage_ok) r.ocv = ocv(residuals, fit.hat_diag);

  if (sigma2) {
    if (r.p < nn) r.cp = cp(r.rss, r.n, r.p, *sigma2);
    if (r.p < nn - 1.0) r.rcp = rcp(r.rss, r.n, r.p, *sigma2);
    if (leverage_ok) r.bplus_hat = bplus_hat(residuals, fit.hat_diag, *sigma2);
    if (r.rcp && r.bplus_hat) r.rcp_plus = rcp_plus(*r.rcp, *r.bplus_hat);
  }
  return r;
}

OptimismReport optimism(const FittedSmoother& fit, double sigma2, std::optional<double> bplus,
                        std::optional<double> vplus) {
  OptimismReport r;
  r.opt_f = 2.0 * sigma2 * model_dimension(fit) / static_cast<double>(fit.n());
  const bool trace_fixed =
      fit.spec.kind == SmootherSpec::Kind::LeastSquares || fit.spec.kind == SmootherSpec::Kind::Knn;
  if (trace_fixed) r.opt_s = r.opt_f;
  if (r.opt_s && bplus && vplus) r.opt_r = *r.opt_s + *bplus + *vplus;
  return r;
}

}  // namespace randomx
