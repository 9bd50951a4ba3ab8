#pragma once

// Monte Carlo estimation of the Random-X error decomposition
//   ErrR = σ² + B + V + B⁺ + V⁺.
// Noise is integrated out analytically for each covariate draw, so the
// Monte Carlo average runs over (X, X0) only.

#include <cstddef>
#include <cstdint>

#include "randomx/linalg.hpp"
#include "randomx/scenario.hpp"
#include "randomx/smoothers.hpp"

namespace randomx {

/// Per-draw conditional moments. The _s terms average over the training
/// points (Same-X), the _r terms over the rows of X0 (Random-X).
struct ConditionalMoments {
  double bias_s = 0.0;
  double var_s = 0.0;
  double bias_r = 0.0;
  double var_r = 0.0;
};

ConditionalMoments conditional_moments_ls(const Matrix& x, const Matrix& x0, std::span<const double> fx,
                                          std::span<const double> fx0, double sigma2);

ConditionalMoments conditional_moments_ridge(const Matrix& x, const Matrix& x0, std::span<const double> fx,
                                             std::span<const double> fx0, double sigma2, double lambda);

ConditionalMoments conditional_moments_knn(const Matrix& x, const Matrix& x0, std::span<const double> fx,
                                           std::span<const double> fx0, double sigma2, std::size_t k);

/// Any linear smoother, through its explicit weight rows.
ConditionalMoments conditional_moments_linear(const SmootherSpec& spec, const Matrix& x, const Matrix& x0,
                                              std::span<const double> fx, std::span<const double> fx0,
                                              double sigma2);

/// Dispatches to the specialised routine for the smoother kind.
ConditionalMoments conditional_moments(const SmootherSpec& spec, const Matrix& x, const Matrix& x0,
                                       std::span<const double> fx, std::span<const double> fx0, double sigma2);

struct DecompositionEstimate {
  double sigma2 = 0.0;
  double B = 0.0;
  double V = 0.0;
  double Bplus = 0.0;
  double Vplus = 0.0;
  double errS = 0.0;
  double errR = 0.0;
  double se_B = 0.0;
  double se_V = 0.0;
  double se_Bplus = 0.0;
  double se_Vplus = 0.0;
  double se_errS = 0.0;
  double se_errR = 0.0;
  /// Standard error of errR − errS from paired replicate differences.
  double se_gap = 0.0;
  std::size_t reps = 0;
};

/// Averages conditional moments over `reps` independent (X, X0) draws, each
/// with n rows. A failing replicate aborts the estimate with ReplicateFailure
/// naming the replicate and seed.
DecompositionEstimate estimate_decomposition(const ScenarioConfig& scenario, const SmootherSpec& smoother,
                                             std::size_t reps, std::size_t threads = 0);

/// Mean and standard error of a set of replicate values.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};
MeanSe mean_and_se(std::span<const double> values);

/// The two terms of E(OCV | X): v(X) from the noise, b(X) from the bias.
struct OcvConditionalDecomp {
  double v_of_X = 0.0;
  double b_of_X = 0.0;
};

OcvConditionalDecomp ocv_conditional(const Matrix& x, std::span<const double> fx, const SmootherSpec& smoother,
                                     double sigma2);

/// Mean of 1/λ over the eigenvalues of ZᵀZ/n, averaged over replicates, with
/// Z drawn from `model`. Computed as tr((ZᵀZ/n)⁻¹)/p.
double eigen_mp_check(std::size_t n, std::size_t p, const CovariateModel& model, std::size_t reps,
                      std::uint64_t seed = 1, std::size_t threads = 0);

}  // namespace randomx
