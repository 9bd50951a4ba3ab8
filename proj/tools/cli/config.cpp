#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>

#include <json.hpp>

#include "randomx/error.hpp"
#include "randomx/rng.hpp"

namespace randomx::cli {

namespace {

using nlohmann::json;

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the offending token.
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                      e.what());
  }
}

/// A JSON value plus its path, so every complaint names the field.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError((path_.empty() ? std::string("<root>") : path_) + ": " + what);
  }

  const std::string& path() const { return path_; }

  void require_object() const {
    if (!value_.is_object()) fail("expected an object");
  }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    require_object();
    for (const auto& item : value_.items())
      if (std::find(keys.begin(), keys.end(), item.key()) == keys.end())
        Node(item.value(), child_path(item.key())).fail("unknown field");
  }

  bool has(const std::string& key) const { return value_.is_object() && value_.contains(key); }

  Node at(const std::string& key) const {
    if (!has(key)) Node(value_, child_path(key)).fail("missing required field");
    return Node(value_.at(key), child_path(key));
  }

  std::optional<Node> get(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return Node(value_.at(key), child_path(key));
  }

  std::vector<Node> elements() const {
    if (!value_.is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < value_.size(); ++i)
      out.emplace_back(value_[i], path_ + "[" + std::to_string(i) + "]");
    return out;
  }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    const double v = value_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  std::uint64_t unsigned_integer() const {
    if (value_.is_number_unsigned()) return value_.get<std::uint64_t>();
    if (value_.is_number_integer()) fail("expected a non-negative integer");
    if (value_.is_number_float()) {
      const double v = value_.get<double>();
      if (v >= 0.0 && v < 1.8446744073709552e19 && std::floor(v) == v) return static_cast<std::uint64_t>(v);
    }
    fail("expected a non-negative integer");
  }

  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }

 private:
  std::string child_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& value_;
  std::string path_;
};

CovariateModel parse_covariates(const Node& node, std::size_t p) {
  node.allow_only({"kind", "blocks", "rho", "base", "sigma_half"});
  const std::string kind = node.at("kind").string();
  const std::size_t blocks = node.has("blocks") ? node.at("blocks").unsigned_integer() : 1;
  const double rho = node.has("rho") ? node.at("rho").number() : 0.0;

  CovariateModel m;
  if (kind == "isotropic_normal") {
    m = CovariateModel::isotropic_normal(p);
  } else if (kind == "normal_block") {
    m = CovariateModel::normal_block(p, blocks, rho);
  } else if (kind == "copula_uniform") {
    m = CovariateModel::copula_uniform(p, blocks, rho);
  } else if (kind == "copula_t4") {
    m = CovariateModel::copula_t4(p, blocks, rho);
  } else if (kind == "scaled_product") {
    BaseDistribution base = BaseDistribution::Normal;
    if (auto b = node.get("base")) {
      const std::string name = b->string();
      if (name == "normal")
        base = BaseDistribution::Normal;
      else if (name == "uniform")
        base = BaseDistribution::Uniform;
      else if (name == "rademacher")
        base = BaseDistribution::Rademacher;
      else
        b->fail("unknown base distribution '" + name + "' (normal, uniform, rademacher)");
    }
    std::optional<Matrix> half;
    if (auto h = node.get("sigma_half")) {
      const auto rows = h->elements();
      Matrix s(rows.size(), rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto cols = rows[i].elements();
        if (cols.size() != rows.size()) rows[i].fail("sigma_half must be square");
        for (std::size_t j = 0; j < cols.size(); ++j) s(i, j) = cols[j].number();
      }
      half = std::move(s);
    }
    m = CovariateModel::scaled_product(p, base, std::move(half));
  } else {
    node.at("kind").fail("unknown covariate model '" + kind +
                         "' (isotropic_normal, normal_block, copula_uniform, copula_t4, scaled_product)");
  }
  try {
    m.validate();
  } catch (const Error& e) {
    node.fail(e.what());
  }
  return m;
}

MeanModel parse_mean(const Node& node, std::size_t p) {
  node.allow_only({"kind", "C", "beta"});
  const std::string kind = node.at("kind").string();
  MeanModel m;
  if (kind == "linear_sum") {
    m = MeanModel::linear_sum();
  } else if (kind == "abs_sum") {
    m = MeanModel::abs_sum(node.at("C").number());
  } else if (kind == "null") {
    m = MeanModel::null();
  } else if (kind == "linear_beta") {
    Vector beta;
    for (const auto& b : node.at("beta").elements()) beta.push_back(b.number());
    m = MeanModel::linear_beta(std::move(beta));
  } else {
    node.at("kind").fail("unknown mean model '" + kind + "' (linear_sum, abs_sum, null, linear_beta)");
  }
  try {
    m.validate(p);
  } catch (const Error& e) {
    node.fail(e.what());
  }
  return m;
}

SmootherSpec parse_smoother(const Node& node) {
  node.allow_only({"kind", "lambda", "k", "kernel", "bandwidth"});
  const std::string kind = node.at("kind").string();
  SmootherSpec s;
  if (kind == "least_squares") {
    s = SmootherSpec::least_squares();
  } else if (kind == "ridge") {
    s = SmootherSpec::ridge(node.at("lambda").number());
  } else if (kind == "kernel_ridge") {
    KernelSpec kernel;
    if (auto k = node.get("kernel")) {
      const std::string name = k->string();
      if (name == "gaussian")
        kernel.kind = KernelSpec::Kind::Gaussian;
      else if (name == "linear")
        kernel.kind = KernelSpec::Kind::Linear;
      else
        k->fail("unknown kernel '" + name + "' (gaussian, linear)");
    }
    if (auto b = node.get("bandwidth")) kernel.bandwidth = b->number();
    s = SmootherSpec::kernel_ridge(node.at("lambda").number(), kernel);
  } else if (kind == "knn") {
    s = SmootherSpec::knn(node.at("k").unsigned_integer());
  } else {
    node.at("kind").fail("unknown smoother '" + kind + "' (least_squares, ridge, kernel_ridge, knn)");
  }
  try {
    s.validate();
  } catch (const Error& e) {
    node.fail(e.what());
  }
  return s;
}

/// Looks a key up in the scenario first, then in the top-level defaults.
std::optional<Node> lookup(const Node& scenario, const Node& root, const std::string& key) {
  if (auto v = scenario.get(key)) return v;
  return root.get(key);
}

Node required(const Node& scenario, const Node& root, const std::string& key) {
  if (auto v = lookup(scenario, root, key)) return *v;
  return scenario.at(key);  // throws, naming the scenario path
}

}  // namespace

StudyConfig parse_study_config(std::string_view json_text, const Overrides& overrides) {
  const json doc = parse_json(json_text);
  const Node root(doc, "");
  root.allow_only({"seed", "n", "p", "sigma", "test_m", "reps", "smoother", "scenarios"});

  StudyConfig cfg;
  if (auto s = root.get("seed")) cfg.seed = s->unsigned_integer();
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (auto s = root.get("smoother")) cfg.smoother = parse_smoother(*s);

  const auto scenarios = root.at("scenarios").elements();
  if (scenarios.empty()) root.at("scenarios").fail("at least one scenario is required");

  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Node& sc = scenarios[i];
    sc.allow_only({"name", "seed", "n", "p", "sigma", "test_m", "reps", "covariates", "mean"});
    ScenarioConfig s;
    s.name = sc.has("name") ? sc.at("name").string() : "scenario" + std::to_string(i);
    const auto n_node = required(sc, root, "n");
    s.n = n_node.unsigned_integer();
    if (s.n < 1) n_node.fail("n must be >= 1");
    const auto p_node = required(sc, root, "p");
    const std::size_t p = p_node.unsigned_integer();
    if (p < 1) p_node.fail("p must be >= 1");
    const auto sigma_node = required(sc, root, "sigma");
    s.noise.sigma = sigma_node.number();
    if (!(s.noise.sigma > 0.0)) sigma_node.fail("sigma must be > 0");
    if (auto t = lookup(sc, root, "test_m")) {
      s.test_m = t->unsigned_integer();
      if (s.test_m < 1) t->fail("test_m must be >= 1");
    }
    if (auto r = lookup(sc, root, "reps")) {
      s.reps = r->unsigned_integer();
      if (s.reps < 2 && !overrides.reps) r->fail("reps must be >= 2");
    }
    if (overrides.reps) s.reps = *overrides.reps;
    s.seed = derive_seed(cfg.seed, i);
    if (auto own = sc.get("seed")) s.seed = own->unsigned_integer();
    s.covariates = parse_covariates(sc.at("covariates"), p);
    s.mean = parse_mean(sc.at("mean"), p);
    cfg.scenarios.push_back(std::move(s));
  }
  return cfg;
}

RidgeConfig parse_ridge_config(std::string_view json_text) {
  const json doc = parse_json(json_text);
  const Node root(doc, "");
  root.allow_only({"n", "p", "reps", "seed", "lambda_min", "lambda_max", "lambda_points"});
  RidgeConfig c;
  if (auto v = root.get("n")) c.n = v->unsigned_integer();
  if (auto v = root.get("p")) c.p = v->unsigned_integer();
  if (auto v = root.get("reps")) c.reps = v->unsigned_integer();
  if (auto v = root.get("seed")) c.seed = v->unsigned_integer();
  if (auto v = root.get("lambda_min")) c.lambda_min = v->number();
  if (auto v = root.get("lambda_max")) c.lambda_max = v->number();
  if (auto v = root.get("lambda_points")) c.lambda_points = v->unsigned_integer();
  return c;
}

std::string covariates_label(const CovariateModel& model) {
  switch (model.kind) {
    case CovariateModel::Kind::IsotropicNormal: return "isotropic_normal";
    case CovariateModel::Kind::NormalBlock: return "normal_block";
    case CovariateModel::Kind::CopulaUniform: return "copula_uniform";
    case CovariateModel::Kind::CopulaT4: return "copula_t4";
    case CovariateModel::Kind::ScaledProduct: return "scaled_product";
  }
  return "unknown";
}

std::string mean_label(const MeanModel& model) {
  switch (model.kind) {
    case MeanModel::Kind::LinearSum: return "linear_sum";
    case MeanModel::Kind::AbsSum: return "abs_sum";
    case MeanModel::Kind::Null: return "null";
    case MeanModel::Kind::LinearBeta: return "linear_beta";
  }
  return "unknown";
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace randomx::cli
