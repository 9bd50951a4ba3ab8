#include "randomx/experiments.hpp"

#include <cmath>
#include <string>

#include "randomx/criteria.hpp"
#include "randomx/error.hpp"
#include "randomx/parallel.hpp"

namespace randomx {

void ScenarioConfig::validate() const {
  covariates.validate();
  mean.validate(covariates.p);
  if (!(noise.sigma >= 0.0)) throw Error(ErrorCode::DomainError, "scenario '" + name + "': sigma must be >= 0");
  if (n < 1) throw Error(ErrorCode::DomainError, "scenario '" + name + "': n must be >= 1");
  if (test_m < 1) throw Error(ErrorCode::DomainError, "scenario '" + name + "': test_m must be >= 1");
  if (reps < 2) throw Error(ErrorCode::DomainError, "scenario '" + name + "': reps must be >= 2");
}

std::vector<DecompositionEstimate> run_decomposition_study(const std::vector<ScenarioConfig>& configs,
                                                           const SmootherSpec& smoother, std::size_t threads) {
  std::vector<DecompositionEstimate> out;
  out.reserve(configs.size());
  for (const auto& c : configs) out.push_back(estimate_decomposition(c, smoother, c.reps, threads));
  return out;
}

const std::vector<std::string>& criteria_methods() {
  static const std::vector<std::string> names{"RCp", "RCpHat", "GCV", "RCpPlus", "OCV"};
  return names;
}

double err_r_target(const FittedSmoother& fit, const Matrix& x_test, std::span<const double> f_test,
                    double sigma2) {
  if (x_test.rows() == 0) throw Error(ErrorCode::DimensionError, "err_r_target: empty test set");
  if (f_test.size() != x_test.rows()) throw Error(ErrorCode::ShapeMismatch, "err_r_target: f length differs");
  const Vector pred = predict(fit, x_test);
  KahanSum s;
  for (std::size_t j = 0; j < pred.size(); ++j) {
    const double d = f_test[j] - pred[j];
    s += d * d;
  }
  return sigma2 + s.value() / static_cast<double>(pred.size());
}

CriteriaReplicates simulate_criteria(const ScenarioConfig& config, std::size_t threads) {
  config.validate();
  const std::size_t p = config.p();
  if (config.n <= p + 1)
    throw Error(ErrorCode::DimensionError, "criteria study '" + config.name + "': requires n > p + 1");

  const std::size_t k = criteria_methods().size();
  const double sigma2 = config.noise.variance();
  CriteriaReplicates out{Matrix(config.reps, k), Vector(config.reps)};

  parallel_for(config.reps, resolve_threads(threads), [&](std::size_t r) {
    try {
      Stream xs(config.seed, r, StreamPurpose::TrainCovariates);
      Stream ns(config.seed, r, StreamPurpose::TrainNoise);
      Stream es(config.seed, r, StreamPurpose::EvalCovariates);
      const TrainingSet data = draw_training_set(config.covariates, config.mean, config.noise, config.n, xs, ns);
      const FittedSmoother model = fit(SmootherSpec::least_squares(), data);
      const CriteriaReport rep = evaluate_criteria(model, data.Y, sigma2);

      const Matrix x_test = draw_covariates(config.covariates, config.test_m, es);
      out.targets[r] = err_r_target(model, x_test, config.mean.evaluate(x_test), sigma2);

      const double values[] = {*rep.rcp, *rep.rcp_hat, *rep.gcv, *rep.rcp_plus, *rep.ocv};
      for (std::size_t m = 0; m < k; ++m) out.values(r, m) = values[m];
    } catch (const Error& e) {
      throw Error(ErrorCode::ReplicateFailure, "scenario '" + config.name + "' replicate " + std::to_string(r) +
                                                   " (seed " + std::to_string(config.seed) + "): " + e.what());
    }
  });
  return out;
}

std::vector<CriteriaMseRow> summarize_criteria(const CriteriaReplicates& replicates) {
  const auto& methods = criteria_methods();
  const std::size_t k = methods.size();
  const std::size_t reps = replicates.targets.size();
  if (replicates.values.rows() != reps || replicates.values.cols() != k)
    throw Error(ErrorCode::ShapeMismatch, "summarize_criteria: value table does not match the targets");
  if (reps == 0) throw Error(ErrorCode::DimensionError, "summarize_criteria: no replicates");

  std::vector<CriteriaMseRow> rows(k);
  const double count = static_cast<double>(reps);
  for (std::size_t m = 0; m < k; ++m) {
    KahanSum s, s2;
    for (std::size_t r = 0; r < reps; ++r) {
      const double d = replicates.values(r, m) - replicates.targets[r];
      s += d;
      s2 += d * d;
    }
    const double bias = s.value() / count;
    rows[m].method = methods[m];
    rows[m].mse = s2.value() / count;
    rows[m].bias2 = bias * bias;
    rows[m].variance = rows[m].mse - rows[m].bias2;
  }
  const double ocv_mse = rows.back().mse;
  for (auto& row : rows) row.rel_to_ocv = row.mse / ocv_mse;
  return rows;
}

std::vector<CriteriaMseRow> run_criteria_study(const ScenarioConfig& config, std::size_t threads) {
  return summarize_criteria(simulate_criteria(config, threads));
}

Vector log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0 && hi >= lo)) throw Error(ErrorCode::DomainError, "log_grid: need 0 < lo <= hi");
  if (points < 1) throw Error(ErrorCode::DomainError, "log_grid: need at least one point");
  if (points == 1) return {lo};
  Vector g(points);
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = std::exp(a + step * static_cast<double>(i));
  g.front() = lo;
  g.back() = hi;
  return g;
}

double ridge_limit_isotropic(std::size_t n, std::size_t p) {
  const double nn = static_cast<double>(n);
  const double pp = static_cast<double>(p);
  const double top = nn * nn * pp;
  return top / (top + nn * pp * pp + nn * pp);
}

RidgeRatioCurve run_ridge_ratio_study(std::size_t n, std::size_t p, const Vector& lambda_grid, std::size_t reps,
                                      std::uint64_t seed, std::size_t threads) {
  if (p < 1 || p >= n) throw Error(ErrorCode::DimensionError, "ridge ratio: requires 0 < p < n");
  if (reps < 2) throw Error(ErrorCode::DomainError, "ridge ratio: reps must be >= 2 for a confidence band");
  if (lambda_grid.empty()) throw Error(ErrorCode::DomainError, "ridge ratio: empty lambda grid");
  for (double l : lambda_grid)
    if (!(l > 0.0)) throw Error(ErrorCode::DomainError, "ridge ratio: lambdas must be > 0");

  const std::size_t g = lambda_grid.size();
  const CovariateModel model = CovariateModel::isotropic_normal(p);
  Vector per_rep(reps * g);

  parallel_for(reps, resolve_threads(threads), [&](std::size_t r) {
    Stream xs(seed, r, StreamPurpose::TrainCovariates);
    Stream ts(seed, r, StreamPurpose::TestCovariates);
    const Matrix x = draw_covariates(model, n, xs);
    const Matrix x0 = draw_covariates(model, n, ts);
    const EigenDecomposition eig = symmetric_eigen(gram(x, 0.0));
    // m_i = u_iᵀ X0ᵀX0 u_i = ‖X0 u_i‖².
    const Matrix proj = multiply(x0, eig.eigenvectors);
    Vector mass(p, 0.0);
    for (std::size_t row = 0; row < proj.rows(); ++row) {
      auto pr = proj.row(row);
      for (std::size_t i = 0; i < p; ++i) mass[i] += pr[i] * pr[i];
    }
    for (std::size_t l = 0; l < g; ++l) {
      const double lambda = lambda_grid[l];
      KahanSum vs, vr;
      for (std::size_t i = 0; i < p; ++i) {
        const double d = std::max(eig.eigenvalues[i], 0.0);
        const double w = d / ((d + lambda) * (d + lambda));
        vs += d * w;
        vr += mass[i] * w;
      }
      per_rep[r * g + l] = vr.value() / vs.value();
    }
  });

  RidgeRatioCurve curve;
  curve.lambdas = lambda_grid;
  curve.theoretical_limit = ridge_limit_isotropic(n, p);
  Vector column(reps);
  for (std::size_t l = 0; l < g; ++l) {
    for (std::size_t r = 0; r < reps; ++r) column[r] = per_rep[r * g + l];
    const MeanSe ms = mean_and_se(column);
    curve.ratio.push_back(ms.mean);
    curve.ci_low.push_back(ms.mean - 1.96 * ms.se);
    curve.ci_high.push_back(ms.mean + 1.96 * ms.se);
  }
  return curve;
}

double ridge_limit_monte_carlo(const CovariateModel& model, std::size_t n, std::size_t reps, std::uint64_t seed,
                               std::size_t threads) {
  model.validate();
  if (reps < 2) throw Error(ErrorCode::DomainError, "ridge_limit_monte_carlo: reps must be >= 2");
  const std::size_t p = model.p;
  std::vector<Matrix> grams(reps);
  Vector sq_trace(reps);
  parallel_for(reps, resolve_threads(threads), [&](std::size_t r) {
    Stream s(seed, r, StreamPurpose::Auxiliary);
    grams[r] = gram(draw_covariates(model, n, s), 0.0);
    // tr(A·A) = ‖A‖²_F for symmetric A.
    const double f = frobenius_norm(grams[r]);
    sq_trace[r] = f * f;
  });

  const std::size_t half = reps / 2;
  Matrix first(p, p), second(p, p);
  for (std::size_t r = 0; r < 2 * half; ++r) {
    Matrix& target = r < half ? first : second;
    auto src = grams[r].data();
    auto dst = target.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  // tr(E₁E₂) with independent halves is unbiased for tr(E[A]²).
  const double cross = dot(first.data(), second.data()) / (static_cast<double>(half) * static_cast<double>(half));
  return cross / mean(sq_trace);
}

}  // namespace randomx
