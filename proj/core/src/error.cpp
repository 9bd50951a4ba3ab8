#include "randomx/error.hpp"

namespace randomx {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionError: return "DimensionError";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::LeverageOne: return "LeverageOne";
    case ErrorCode::DegenerateNeighbors: return "DegenerateNeighbors";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ReplicateFailure: return "ReplicateFailure";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace randomx
