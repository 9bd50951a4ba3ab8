#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "randomx/criteria.hpp"
#include "randomx/csv.hpp"
#include "randomx/error.hpp"
#include "randomx/experiments.hpp"

#ifndef RANDOMX_VERSION
#define RANDOMX_VERSION "0.0.0"
#endif

namespace randomx::cli {

namespace {

struct GlobalFlags {
  std::string config;
  std::string out;
  std::string manifest;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::size_t threads = 0;
};

struct RidgeFlags {
  std::optional<std::size_t> n, p, points;
  std::optional<double> lambda_min, lambda_max;
};

struct EvalFlags {
  std::string data;
  std::optional<double> sigma2;
  std::string smoother = "least_squares";
  double lambda = 1.0;
  std::size_t k = 5;
  std::string kernel = "gaussian";
  double bandwidth = 0.0;
};

/// Thrown for unreadable input files; reported with the config exit code.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Manifest {
  std::string command;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string started;
};

void emit(const GlobalFlags& g, const Manifest& m, const std::string& csv, std::ostream& out) {
  if (g.out.empty()) {
    out << csv;
  } else {
    std::ofstream f(g.out, std::ios::binary);
    if (!f) throw InputError("cannot write '" + g.out + "'");
    f << csv;
  }
  const std::string manifest_path = !g.manifest.empty() ? g.manifest : g.out.empty() ? "" : g.out + ".manifest.json";
  if (manifest_path.empty()) return;
  const nlohmann::ordered_json doc = {
      {"command", m.command}, {"config_digest", m.config_digest}, {"seed", m.seed},
      {"version", RANDOMX_VERSION}, {"started", m.started},       {"finished", utc_now()},
  };
  std::ofstream f(manifest_path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + manifest_path + "'");
  f << doc.dump(2) << '\n';
}

std::string require_config(const GlobalFlags& g, const char* command) {
  if (g.config.empty()) throw ConfigError(std::string(command) + ": --config is required");
  return read_file(g.config);
}

int cmd_decompose(const GlobalFlags& g, std::ostream& out) {
  Manifest m{"decompose", "", 0, utc_now()};
  const std::string text = require_config(g, "decompose");
  m.config_digest = fnv1a_hex(text);
  const StudyConfig cfg = parse_study_config(text, {g.seed, g.reps});
  m.seed = cfg.seed;
  const auto estimates = run_decomposition_study(cfg.scenarios, cfg.smoother, g.threads);

  CsvTable t;
  t.header = {"scenario", "covariates", "mean", "n", "p", "sigma", "B", "se_B", "V", "se_V",
              "Bplus", "se_Bplus", "Vplus", "se_Vplus", "errS", "errR"};
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const auto& s = cfg.scenarios[i];
    const auto& e = estimates[i];
    t.rows.push_back({s.name, covariates_label(s.covariates), mean_label(s.mean), std::to_string(s.n),
                      std::to_string(s.p()), format_double(s.noise.sigma), format_double(e.B), format_double(e.se_B),
                      format_double(e.V), format_double(e.se_V), format_double(e.Bplus), format_double(e.se_Bplus),
                      format_double(e.Vplus), format_double(e.se_Vplus), format_double(e.errS),
                      format_double(e.errR)});
  }
  emit(g, m, to_csv(t), out);
  return kExitOk;
}

int cmd_criteria(const GlobalFlags& g, std::ostream& out) {
  Manifest m{"criteria", "", 0, utc_now()};
  const std::string text = require_config(g, "criteria");
  m.config_digest = fnv1a_hex(text);
  const StudyConfig cfg = parse_study_config(text, {g.seed, g.reps});
  m.seed = cfg.seed;
  if (cfg.smoother.kind != SmootherSpec::Kind::LeastSquares)
    throw ConfigError("smoother: the criteria study fits least squares only");
  for (std::size_t i = 0; i < cfg.scenarios.size(); ++i)
    if (cfg.scenarios[i].n <= cfg.scenarios[i].p() + 1)
      throw ConfigError("scenarios[" + std::to_string(i) + "]: the criteria study needs n > p + 1");

  CsvTable t;
  t.header = {"scenario", "method", "mse", "bias2", "variance", "rel_to_ocv"};
  for (const auto& s : cfg.scenarios)
    for (const auto& row : run_criteria_study(s, g.threads))
      t.rows.push_back({s.name, row.method, format_double(row.mse), format_double(row.bias2),
                        format_double(row.variance), format_double(row.rel_to_ocv)});
  emit(g, m, to_csv(t), out);
  return kExitOk;
}

int cmd_ridge_ratio(const GlobalFlags& g, const RidgeFlags& f, std::ostream& out) {
  Manifest m{"ridge-ratio", fnv1a_hex(""), 0, utc_now()};
  RidgeConfig c;
  if (!g.config.empty()) {
    const std::string text = read_file(g.config);
    m.config_digest = fnv1a_hex(text);
    c = parse_ridge_config(text);
  }
  if (f.n) c.n = *f.n;
  if (f.p) c.p = *f.p;
  if (f.points) c.lambda_points = *f.points;
  if (f.lambda_min) c.lambda_min = *f.lambda_min;
  if (f.lambda_max) c.lambda_max = *f.lambda_max;
  if (g.reps) c.reps = *g.reps;
  if (g.seed) c.seed = *g.seed;
  m.seed = c.seed;

  if (c.p < 1) throw ConfigError("p: must be >= 1");
  if (c.p >= c.n) throw ConfigError("p: must be < n");
  if (c.reps < 2) throw ConfigError("reps: must be >= 2 to form a confidence band");
  if (c.lambda_points < 1) throw ConfigError("lambda_points: must be >= 1");
  if (!(c.lambda_min > 0.0 && c.lambda_max >= c.lambda_min))
    throw ConfigError("lambda_min/lambda_max: need 0 < lambda_min <= lambda_max");

  const auto curve =
      run_ridge_ratio_study(c.n, c.p, log_grid(c.lambda_min, c.lambda_max, c.lambda_points), c.reps, c.seed,
                            g.threads);
  CsvTable t;
  t.header = {"lambda", "ratio", "ci_low", "ci_high", "theory_limit"};
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i)
    t.rows.push_back({format_double(curve.lambdas[i]), format_double(curve.ratio[i]), format_double(curve.ci_low[i]),
                      format_double(curve.ci_high[i]), format_double(curve.theoretical_limit)});
  emit(g, m, to_csv(t), out);
  return kExitOk;
}

SmootherSpec eval_smoother(const EvalFlags& f) {
  if (f.smoother == "least_squares") return SmootherSpec::least_squares();
  if (f.smoother == "ridge") return SmootherSpec::ridge(f.lambda);
  if (f.smoother == "knn") return SmootherSpec::knn(f.k);
  KernelSpec kernel;
  kernel.kind = f.kernel == "linear" ? KernelSpec::Kind::Linear : KernelSpec::Kind::Gaussian;
  kernel.bandwidth = f.bandwidth;
  return SmootherSpec::kernel_ridge(f.lambda, kernel);
}

int cmd_eval(const GlobalFlags& g, const EvalFlags& f, std::ostream& out, std::ostream& err) {
  const std::string text = read_file(f.data);
  Manifest m{"eval", fnv1a_hex(text), 0, utc_now()};
  const NumericTable table = parse_numeric_csv(text);
  if (table.header.size() < 2) throw Error(ErrorCode::ParseError, "line 1: need at least one covariate and a response");
  if (table.values.rows() == 0) throw Error(ErrorCode::ParseError, "no data rows");
  if (f.sigma2 && !(*f.sigma2 >= 0.0)) throw ConfigError("--sigma2: must be >= 0");

  const std::size_t n = table.values.rows();
  const std::size_t p = table.header.size() - 1;
  Matrix x(n, p);
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) x(i, j) = table.values(i, j);
    y[i] = table.values(i, p);
  }

  const SmootherSpec spec = eval_smoother(f);
  try {
    spec.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("smoother flags: ") + e.what());
  }
  const FittedSmoother model = fit(spec, x, y);
  const CriteriaReport r = evaluate_criteria(model, y, f.sigma2);

  Vector residuals(n);
  for (std::size_t i = 0; i < n; ++i) residuals[i] = y[i] - model.fitted[i];

  // Re-run the defining formula of an omitted criterion to report why it is
  // undefined for this fit.
  auto explain = [&](const char* key, const std::function<void()>& formula) {
    try {
      formula();
    } catch (const Error& e) {
      err << key << " omitted: " << e.what() << '\n';
    }
  };

  CsvTable t;
  t.header = {"key", "value"};
  auto add = [&](const char* key, const std::optional<double>& v) {
    if (v) t.rows.push_back({key, format_double(*v)});
  };
  add("rss", r.rss);
  add("sigma2_hat", r.sigma2_hat);
  add("cp", r.cp);
  add("rcp", r.rcp);
  add("rcp_hat", r.rcp_hat);
  add("gcv", r.gcv);
  add("ocv", r.ocv);
  add("bplus_hat", r.bplus_hat);
  add("rcp_plus", r.rcp_plus);

  if (!r.gcv) explain("gcv", [&] { gcv(r.rss, r.n, r.p); });
  if (!r.rcp_hat) explain("rcp_hat", [&] { rcp_hat(r.rss, r.n, r.p); });
  if (!r.ocv) explain("ocv", [&] { ocv(residuals, model.hat_diag); });
  if (f.sigma2) {
    if (!r.cp) explain("cp", [&] { cp(r.rss, r.n, r.p, *f.sigma2); });
    if (!r.rcp) explain("rcp", [&] { rcp(r.rss, r.n, r.p, *f.sigma2); });
    if (!r.bplus_hat) explain("bplus_hat", [&] { bplus_hat(residuals, model.hat_diag, *f.sigma2); });
    if (!r.rcp_plus) err << "rcp_plus omitted: needs both rcp and bplus_hat\n";
  }
  emit(g, m, to_csv(t), out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random-X prediction error: decomposition studies, criteria studies and data evaluation",
               "randomx-eval"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  app.add_option("--config", g.config, "JSON study configuration");
  app.add_option("--out", g.out, "write CSV here instead of stdout");
  app.add_option("--manifest", g.manifest, "run manifest path (default <out>.manifest.json)");
  auto* seed_opt = app.add_option("--seed", seed, "master seed override");
  auto* reps_opt = app.add_option("--reps", reps, "replicate count override");
  app.add_option("--threads", g.threads, "worker cap (default RANDOMX_EVAL_THREADS, else all cores)");
  app.set_version_flag("--version", RANDOMX_VERSION);

  auto* decompose = app.add_subcommand("decompose", "B, V, B+, V+ table for every scenario");
  auto* criteria = app.add_subcommand("criteria", "criterion MSE relative to OCV for every scenario");
  auto* ridge = app.add_subcommand("ridge-ratio", "ridge Random-X / Same-X variance ratio over a lambda grid");
  auto* eval = app.add_subcommand("eval", "criteria for one data set (CSV, response in the last column)");

  RidgeFlags rf;
  ridge->add_option("--n", rf.n, "training size (default 300)");
  ridge->add_option("--p", rf.p, "dimension (default 100)");
  ridge->add_option("--lambda-min", rf.lambda_min, "smallest lambda (default 1)");
  ridge->add_option("--lambda-max", rf.lambda_max, "largest lambda (default 1e6)");
  ridge->add_option("--lambda-points", rf.points, "grid size (default 40)");

  EvalFlags ef;
  eval->add_option("--data", ef.data, "CSV with header; last column is the response")->required();
  eval->add_option("--sigma2", ef.sigma2, "known noise variance; enables cp, rcp, bplus_hat, rcp_plus");
  eval->add_option("--smoother", ef.smoother, "least_squares, ridge, kernel_ridge or knn")
      ->check(CLI::IsMember({"least_squares", "ridge", "kernel_ridge", "knn"}));
  eval->add_option("--lambda", ef.lambda, "ridge or kernel ridge penalty");
  eval->add_option("--k", ef.k, "neighbours for knn");
  eval->add_option("--kernel", ef.kernel, "gaussian or linear")->check(CLI::IsMember({"gaussian", "linear"}));
  eval->add_option("--bandwidth", ef.bandwidth, "Gaussian bandwidth (0 = median pairwise distance)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << RANDOMX_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "randomx-eval: " << e.what() << '\n';
    return kExitConfig;
  }
  if (seed_opt->count()) g.seed = seed;
  if (reps_opt->count()) g.reps = reps;

  try {
    if (decompose->parsed()) return cmd_decompose(g, out);
    if (criteria->parsed()) return cmd_criteria(g, out);
    if (ridge->parsed()) return cmd_ridge_ratio(g, rf, out);
    if (eval->parsed()) return cmd_eval(g, ef, out, err);
  } catch (const ConfigError& e) {
    err << "randomx-eval: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InputError& e) {
    err << "randomx-eval: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "randomx-eval: " << e.what() << '\n';
    return e.code() == ErrorCode::ParseError ? kExitConfig : kExitNumeric;
  }
  return kExitConfig;
}

}  // namespace randomx::cli
