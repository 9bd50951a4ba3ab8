#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace randomx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one randomx-eval invocation. `args` excludes the program name. CSV
/// goes to `out` unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace randomx::cli
