#pragma once

// Covariance-penalty estimates of prediction error for a fitted smoother, in
// squared-response units. `p` is the model dimension: the column count for
// least squares, tr S(X) for other linear smoothers.

#include <cstddef>
#include <optional>
#include <span>

#include "randomx/smoothers.hpp"

namespace randomx {

/// Mallows' Cp: RSS/n + 2σ²p/n.
double cp(double rss, std::size_t n, double p, double sigma2);

/// Random-X Cp: Cp plus the normal-design excess variance. Requires p < n−1.
double rcp(double rss, std::size_t n, double p, double sigma2);

/// RSS(n−1)/((n−p)(n−p−1)); RCp with σ² replaced by RSS/(n−p). Identical to Sp.
double rcp_hat(double rss, std::size_t n, double p);

/// The same quantity written as RSS/n + (σ̂²p/n)(2 + (p+1)/(n−p−1)).
double rcp_hat_plugin(double rss, std::size_t n, double p);

/// RSS / (n(1 − p/n)²).
double gcv(double rss, std::size_t n, double p);

/// Leave-one-out CV via the leverage shortcut (1/n) Σ (r_i / (1 − h_ii))².
double ocv(std::span<const double> residuals, std::span<const double> hat_diag);

/// (1/n) Σ (r_i² − (1−h_ii)σ²)(1/(1−h_ii)² − 1). Reported untruncated.
double bplus_hat(std::span<const double> residuals, std::span<const double> hat_diag, double sigma2);

double rcp_plus(double rcp_value, double bplus_hat_value);

/// OCV − (σ²/n) Σ h_ii/(1−h_ii) + (σ²p/n)(1 + (p+1)/(n−p−1)); equals
/// rcp + bplus_hat for the same fit.
double rcp_plus_from_ocv(double ocv_value, std::span<const double> hat_diag, double p, double sigma2);

/// Excess variance of least squares under normal covariates:
/// (σ²p/n)(p+1)/(n−p−1), whatever the covariance.
double vplus_normal_exact(std::size_t n, double p, double sigma2);

/// Limit σ²γ²/(1−γ) of the excess variance as p/n → γ.
double vplus_asymptotic(double gamma, double sigma2);

/// Limiting Random-X optimism σ²γ(2−γ)/(1−γ) for an unbiased linear model.
double optr_asymptotic(double gamma, double sigma2);

struct CriteriaReport {
  double rss = 0.0;
  std::size_t n = 0;
  double p = 0.0;
  std::optional<double> sigma2;
  std::optional<double> sigma2_hat;
  std::optional<double> cp;
  std::optional<double> rcp;
  std::optional<double> rcp_hat;
  std::optional<double> gcv;
  std::optional<double> ocv;
  std::optional<double> bplus_hat;
  std::optional<double> rcp_plus;
};

/// Evaluates every criterion whose preconditions hold for this fit; the rest
/// stay empty. Criteria needing σ² are computed only when it is supplied.
CriteriaReport evaluate_criteria(const FittedSmoother& fit, std::span<const double> y,
                                 std::optional<double> sigma2 = std::nullopt);

/// Model dimension used by the criteria: p for least squares, tr S otherwise.
double model_dimension(const FittedSmoother& fit);

struct OptimismReport {
  double opt_f = 0.0;
  std::optional<double> opt_s;
  std::optional<double> opt_r;
};

/// OptF = 2σ² tr S(X)/n. OptS equals OptF when the trace does not depend on X
/// (least squares, kNN). OptR = OptS + B⁺ + V⁺ when both excess terms are given.
OptimismReport optimism(const FittedSmoother& fit, double sigma2, std::optional<double> bplus = std::nullopt,
                        std::optional<double> vplus = std::nullopt);

}  // namespace randomx
