#pragma once

// Counter-based random streams. Every replicate of every study draws from its
// own stream keyed by (master seed, replicate index, purpose tag), so results
// do not depend on scheduling or thread count.

#include <array>
#include <cstdint>

namespace randomx {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept;
};

/// Purpose tags keep the draws for different roles within a replicate apart.
enum class StreamPurpose : std::uint32_t {
  TrainCovariates = 1,
  TestCovariates = 2,
  TrainNoise = 3,
  EvalCovariates = 4,
  Auxiliary = 5,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for a derived sub-study (e.g. scenario index i of a study).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

class Stream {
 public:
  Stream(std::uint64_t master_seed, std::uint64_t replicate, StreamPurpose purpose) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  /// Standard normal via Box–Muller; the second variate of each pair is cached.
  double normal() noexcept;

 private:
  void refill() noexcept;

  Philox4x32::Key key_{};
  std::uint32_t replicate_lo_ = 0;
  std::uint32_t purpose_ = 0;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int buffered_words_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace randomx
