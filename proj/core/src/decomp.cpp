#include "randomx/decomp.hpp"

#include <cmath>
#include <string>

#include "randomx/error.hpp"
#include "randomx/parallel.hpp"

namespace randomx {

namespace {

void check_inputs(const Matrix& x, const Matrix& x0, std::span<const double> fx, std::span<const double> fx0,
                  double sigma2) {
  if (x.cols() != x0.cols()) throw Error(ErrorCode::ShapeMismatch, "conditional moments: X and X0 differ in p");
  if (fx.size() != x.rows()) throw Error(ErrorCode::ShapeMismatch, "conditional moments: f(X) length differs");
  if (fx0.size() != x0.rows()) throw Error(ErrorCode::ShapeMismatch, "conditional moments: f(X0) length differs");
  if (x.rows() == 0 || x0.rows() == 0) throw Error(ErrorCode::DimensionError, "conditional moments: empty sample");
  if (!(sigma2 >= 0.0)) throw Error(ErrorCode::DomainError, "conditional moments: sigma2 must be >= 0");
}

Cholesky factor_or_rank_error(const Matrix& x, double lambda) {
  try {
    return Cholesky(gram(x, lambda));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotPositiveDefinite)
      throw Error(ErrorCode::RankDeficient, "XᵀX + λI is singular; X lacks full column rank");
    throw;
  }
}

double mean_squared_gap(std::span<const double> a, std::span<const double> b) {
  KahanSum s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s.value() / static_cast<double>(a.size());
}

/// Both bias terms for a linear fit with coefficients β of the mean.
void linear_biases(ConditionalMoments& m, const Matrix& x, const Matrix& x0, std::span<const double> fx,
                   std::span<const double> fx0, const Cholesky& chol) {
  const Vector beta = chol.solve(multiply_transposed(x, fx));
  m.bias_s = mean_squared_gap(multiply(x, beta), fx);
  m.bias_r = mean_squared_gap(multiply(x0, beta), fx0);
}

double squared_frobenius(const Matrix& a) {
  const double f = frobenius_norm(a);
  return f * f;
}

}  // namespace

ConditionalMoments conditional_moments_ls(const Matrix& x, const Matrix& x0, std::span<const double> fx,
                                          std::span<const double> fx0, double sigma2) {
  check_inputs(x, x0, fx, fx0, sigma2);
  const Cholesky chol = factor_or_rank_error(x, 0.0);
  ConditionalMoments m;
  linear_biases(m, x, x0, fx, fx0, chol);
  const double n = static_cast<double>(x.rows());
  const double m0 = static_cast<double>(x0.rows());
  m.var_s = sigma2 * static_cast<double>(x.cols()) / n;
  // tr(X0 (XᵀX)⁻¹ X0ᵀ) = ‖L⁻¹X0ᵀ‖²_F
  m.var_r = sigma2 / m0 * squared_frobenius(chol.forward(x0.transpose()));
  return m;
}

ConditionalMoments conditional_moments_ridge(const Matrix& x, const Matrix& x0, std::span<const double> fx,
                                             std::span<const double> fx0, double sigma2, double lambda) {
  check_inputs(x, x0, fx, fx0, sigma2);
  if (!(lambda >= 0.0)) throw Error(ErrorCode::DomainError, "ridge moments: lambda must be >= 0");
  const Cholesky chol = factor_or_rank_error(x, lambda);
  ConditionalMoments m;
  linear_biases(m, x, x0, fx, fx0, chol);

  // With W = L⁻¹Xᵀ the smoother is S = WᵀW, so tr(SSᵀ) = ‖WWᵀ‖²_F and the
  // test-side trace is Σ_j v_jᵀ (WWᵀ) v_j over the columns of V0 = L⁻¹X0ᵀ.
  const Matrix w = chol.forward(x.transpose());
  const Matrix g = multiply(w, w.transpose());
  const Matrix v0 = chol.forward(x0.transpose());
  const Matrix gv0 = multiply(g, v0);
  KahanSum quad;
  for (std::size_t i = 0; i < v0.rows(); ++i) quad += dot(v0.row(i), gv0.row(i));

  m.var_s = sigma2 / static_cast<double>(x.rows()) * squared_frobenius(g);
  m.var_r = sigma2 / static_cast<double>(x0.rows()) * quad.value();
  return m;
}

ConditionalMoments conditional_moments_knn(const Matrix& x, const Matrix& x0, std::span<const double> fx,
                                           std::span<const double> fx0, double sigma2, std::size_t k) {
  check_inputs(x, x0, fx, fx0, sigma2);
  const auto in_sets = self_neighbor_sets(x, k);
  const auto out_sets = neighbor_sets(x, x0, k);
  const double kk = static_cast<double>(k);

  auto average = [&](const std::vector<std::size_t>& set) {
    KahanSum s;
    for (std::size_t j : set) s += fx[j];
    return s.value() / kk;
  };
  KahanSum bs;
  for (std::size_t i = 0; i < in_sets.size(); ++i) {
    const double d = average(in_sets[i]) - fx[i];
    bs += d * d;
  }
  KahanSum br;
  for (std::size_t i = 0; i < out_sets.size(); ++i) {
    const double d = average(out_sets[i]) - fx0[i];
    br += d * d;
  }
  ConditionalMoments m;
  m.bias_s = bs.value() / static_cast<double>(x.rows());
  m.bias_r = br.value() / static_cast<double>(x0.rows());
  m.var_s = sigma2 / kk;
  m.var_r = sigma2 / kk;
  return m;
}

ConditionalMoments conditional_moments_linear(const SmootherSpec& spec, const Matrix& x, const Matrix& x0,
                                              std::span<const double> fx, std::span<const double> fx0,
                                              double sigma2) {
  check_inputs(x, x0, fx, fx0, sigma2);
  const Matrix s = smoother_matrix(spec, x);
  const Matrix s0 = smoother_weights(spec, x, x0);
  ConditionalMoments m;
  m.bias_s = mean_squared_gap(multiply(s, fx), fx);
  m.bias_r = mean_squared_gap(multiply(s0, fx), fx0);
  m.var_s = sigma2 / static_cast<double>(x.rows()) * squared_frobenius(s);
  m.var_r = sigma2 / static_cast<double>(x0.rows()) * squared_frobenius(s0);
  return m;
}

ConditionalMoments conditional_moments(const SmootherSpec& spec, const Matrix& x, const Matrix& x0,
                                       std::span<const double> fx, std::span<const double> fx0, double sigma2) {
  spec.validate();
  switch (spec.kind) {
    case SmootherSpec::Kind::LeastSquares:
      return conditional_moments_ls(x, x0, fx, fx0, sigma2);
    case SmootherSpec::Kind::Ridge:
      return conditional_moments_ridge(x, x0, fx, fx0, sigma2, spec.lambda);
    case SmootherSpec::Kind::Knn:
      return conditional_moments_knn(x, x0, fx, fx0, sigma2, spec.k);
    case SmootherSpec::Kind::KernelRidge:
      return conditional_moments_linear(spec, x, x0, fx, fx0, sigma2);
  }
  return {};
}

MeanSe mean_and_se(std::span<const double> values) {
  MeanSe out;
  if (values.empty()) return out;
  out.mean = mean(values);
  if (values.size() < 2) return out;
  KahanSum ss;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double n = static_cast<double>(values.size());
  out.se = std::sqrt(ss.value() / (n - 1.0) / n);
  return out;
}

DecompositionEstimate estimate_decomposition(const ScenarioConfig& scenario, const SmootherSpec& smoother,
                                             std::size_t reps, std::size_t threads) {
  scenario.validate();
  smoother.validate();
  if (reps < 2) throw Error(ErrorCode::DomainError, "estimate_decomposition: reps must be >= 2");

  const double sigma2 = scenario.noise.variance();
  std::vector<ConditionalMoments> draws(reps);
  parallel_for(reps, resolve_threads(threads), [&](std::size_t r) {
    try {
      Stream xs(scenario.seed, r, StreamPurpose::TrainCovariates);
      Stream ts(scenario.seed, r, StreamPurpose::TestCovariates);
      const Matrix x = draw_covariates(scenario.covariates, scenario.n, xs);
      const Matrix x0 = draw_covariates(scenario.covariates, scenario.n, ts);
      const Vector fx = scenario.mean.evaluate(x);
      const Vector fx0 = scenario.mean.evaluate(x0);
      draws[r] = conditional_moments(smoother, x, x0, fx, fx0, sigma2);
    } catch (const Error& e) {
      throw Error(ErrorCode::ReplicateFailure, "scenario '" + scenario.name + "' replicate " + std::to_string(r) +
                                                   " (seed " + std::to_string(scenario.seed) + "): " + e.what());
    }
  });

  Vector b(reps), v(reps), bplus(reps), vplus(reps), err_s(reps), err_r(reps), gap(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto& d = draws[r];
    b[r] = d.bias_s;
    v[r] = d.var_s;
    bplus[r] = d.bias_r - d.bias_s;
    vplus[r] = d.var_r - d.var_s;
    err_s[r] = sigma2 + d.bias_s + d.var_s;
    err_r[r] = sigma2 + d.bias_r + d.var_r;
    gap[r] = err_r[r] - err_s[r];
  }

  DecompositionEstimate est;
  est.sigma2 = sigma2;
  est.reps = reps;
  const auto mb = mean_and_se(b), mv = mean_and_se(v), mbp = mean_and_se(bplus), mvp = mean_and_se(vplus);
  const auto ms = mean_and_se(err_s), mr = mean_and_se(err_r), mg = mean_and_se(gap);
  est.B = mb.mean;
  est.V = mv.mean;
  est.Bplus = mbp.mean;
  est.Vplus = mvp.mean;
  est.se_B = mb.se;
  est.se_V = mv.se;
  est.se_Bplus = mbp.se;
  est.se_Vplus = mvp.se;
  est.se_errS = ms.se;
  est.se_errR = mr.se;
  est.se_gap = mg.se;
  // Assemble the totals from their parts so the identities hold exactly.
  est.errS = sigma2 + est.B + est.V;
  est.errR = est.errS + est.Bplus + est.Vplus;
  return est;
}

OcvConditionalDecomp ocv_conditional(const Matrix& x, std::span<const double> fx, const SmootherSpec& smoother,
                                     double sigma2) {
  if (fx.size() != x.rows()) throw Error(ErrorCode::ShapeMismatch, "ocv_conditional: f(X) length differs");
  if (!(sigma2 >= 0.0)) throw Error(ErrorCode::DomainError, "ocv_conditional: sigma2 must be >= 0");
  const std::size_t n = x.rows();
  const Matrix s = smoother_matrix(smoother, x);
  const Vector sf = multiply(s, fx);

  // The leave-one-out residual is (e_i − s_i)ᵀY / (1 − h_ii); its conditional
  // second moment splits into a noise part and a mean part.
  KahanSum v, b;
  for (std::size_t i = 0; i < n; ++i) {
    const double keep = 1.0 - s(i, i);
    if (!(keep > 1e-12))
      throw Error(ErrorCode::LeverageOne, "ocv_conditional: observation " + std::to_string(i) + " has leverage one");
    double row_norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double e = (i == j ? 1.0 : 0.0) - s(i, j);
      row_norm += e * e;
    }
    const double scale = 1.0 / (keep * keep);
    v += row_norm * scale;
    const double r = fx[i] - sf[i];
    b += r * r * scale;
  }
  const double nn = static_cast<double>(n);
  return {sigma2 * v.value() / nn, b.value() / nn};
}

double eigen_mp_check(std::size_t n, std::size_t p, const CovariateModel& model, std::size_t reps,
                      std::uint64_t seed, std::size_t threads) {
  model.validate();
  if (model.p != p) throw Error(ErrorCode::ShapeMismatch, "eigen_mp_check: model p differs from p");
  if (p == 0 || p >= n) throw Error(ErrorCode::DimensionError, "eigen_mp_check: requires 0 < p < n");
  if (reps == 0) throw Error(ErrorCode::DomainError, "eigen_mp_check: reps must be >= 1");

  Vector per_rep(reps);
  parallel_for(reps, resolve_threads(threads), [&](std::size_t r) {
    Stream s(seed, r, StreamPurpose::Auxiliary);
    const Matrix z = draw_covariates(model, n, s);
    Matrix a = gram(z, 0.0);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (double& e : a.data()) e *= inv_n;
    // tr(A⁻¹) = ‖L⁻¹‖²_F
    const Cholesky chol(a);
    per_rep[r] = squared_frobenius(chol.forward(Matrix::identity(p))) / static_cast<double>(p);
  });
  return mean(per_rep);
}

}  // namespace randomx
