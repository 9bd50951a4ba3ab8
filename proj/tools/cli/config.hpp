#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "randomx/scenario.hpp"
#include "randomx/smoothers.hpp"

namespace randomx::cli {

/// Invalid configuration: bad JSON (reported as line:column) or a field that
/// fails validation (reported by its path, e.g. scenarios[2].covariates.rho).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
};

struct StudyConfig {
  std::uint64_t seed = 1;
  SmootherSpec smoother = SmootherSpec::least_squares();
  std::vector<ScenarioConfig> scenarios;
};

/// Top-level keys n, p, sigma, test_m, reps and seed act as defaults that a
/// scenario may override. Scenarios without their own seed get one derived
/// from the master seed and their index.
StudyConfig parse_study_config(std::string_view json_text, const Overrides& overrides = {});

struct RidgeConfig {
  std::size_t n = 300;
  std::size_t p = 100;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  double lambda_min = 1.0;
  double lambda_max = 1e6;
  std::size_t lambda_points = 40;
};

RidgeConfig parse_ridge_config(std::string_view json_text);

std::string covariates_label(const CovariateModel& model);
std::string mean_label(const MeanModel& model);

/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace randomx::cli
