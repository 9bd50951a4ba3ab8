#pragma once

#include <cstdint>
#include <string>

#include "randomx/datagen.hpp"

namespace randomx {

/// One simulation cell: how covariates, means and noise are drawn, at what
/// size, and how many replicates.
struct ScenarioConfig {
  std::string name;
  CovariateModel covariates;
  MeanModel mean;
  NoiseModel noise;
  std::size_t n = 100;
  std::size_t test_m = 10000;
  std::size_t reps = 5000;
  std::uint64_t seed = 0;

  std::size_t p() const noexcept { return covariates.p; }
  void validate() const;
};

}  // namespace randomx
