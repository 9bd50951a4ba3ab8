#pragma once

// Simulation studies: decomposition tables over a list of scenarios, the
// criterion-MSE comparison against leave-one-out CV, and the ridge
// variance-ratio curve.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "randomx/decomp.hpp"
#include "randomx/scenario.hpp"
#include "randomx/smoothers.hpp"

namespace randomx {

std::vector<DecompositionEstimate> run_decomposition_study(const std::vector<ScenarioConfig>& configs,
                                                           const SmootherSpec& smoother, std::size_t threads = 0);

struct CriteriaMseRow {
  std::string method;
  double mse = 0.0;
  double bias2 = 0.0;
  double variance = 0.0;
  double rel_to_ocv = 0.0;
};

/// Method names in output order.
const std::vector<std::string>& criteria_methods();

/// Per-replicate criterion values (one row per replicate, one column per
/// method in criteria_methods() order) and the replicate's Random-X error.
struct CriteriaReplicates {
  Matrix values;
  Vector targets;
};

/// Fits least squares in every replicate, evaluates each criterion and
/// measures that replicate's Random-X error on `config.test_m` fresh test points.
CriteriaReplicates simulate_criteria(const ScenarioConfig& config, std::size_t threads = 0);

/// MSE of each criterion against the per-replicate target, with its
/// squared-bias and variance parts.
std::vector<CriteriaMseRow> summarize_criteria(const CriteriaReplicates& replicates);

/// summarize_criteria(simulate_criteria(config)).
std::vector<CriteriaMseRow> run_criteria_study(const ScenarioConfig& config, std::size_t threads = 0);

/// σ² + (1/m) Σ_j (f(x0_j) − f̂(x0_j))².
double err_r_target(const FittedSmoother& fit, const Matrix& x_test, std::span<const double> f_test, double sigma2);

struct RidgeRatioCurve {
  Vector lambdas;
  Vector ratio;
  Vector ci_low;
  Vector ci_high;
  double theoretical_limit = 0.0;
};

/// `points` logarithmically spaced values from lo to hi inclusive.
Vector log_grid(double lo, double hi, std::size_t points);

/// Ratio of Random-X to Same-X ridge variance under isotropic normal
/// covariates, averaged over replicates. Each replicate contributes
/// Var_R/Var_S for a fresh (X, X0) pair of n rows each.
RidgeRatioCurve run_ridge_ratio_study(std::size_t n, std::size_t p, const Vector& lambda_grid, std::size_t reps,
                                      std::uint64_t seed, std::size_t threads = 0);

/// Large-λ limit n²p / (n²p + np² + np) of the ratio for isotropic normal
/// covariates.
double ridge_limit_isotropic(std::size_t n, std::size_t p);

/// Large-λ limit tr(E[XᵀX]²) / tr(E[XᵀX XᵀX]) for an arbitrary covariate
/// model, estimated by Monte Carlo. The squared mean is formed from two
/// independent halves of the replicates so that it is unbiased.
double ridge_limit_monte_carlo(const CovariateModel& model, std::size_t n, std::size_t reps, std::uint64_t seed,
                               std::size_t threads = 0);

}  // namespace randomx
