#include "rmpc/error.hpp"

namespace rmpc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyPolytope:
      return "EmptyPolytope";
    case ErrorCode::kUnbounded:
      return "Unbounded";
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kNoConvergence:
      return "NoConvergence";
    case ErrorCode::kUnboundedConstraintSet:
      return "UnboundedConstraintSet";
    case ErrorCode::kHistoryLengthMismatch:
      return "HistoryLengthMismatch";
    case ErrorCode::kVertexUnstable:
      return "VertexUnstable";
    case ErrorCode::kEmptyTerminalSet:
      return "EmptyTerminalSet";
    case ErrorCode::kLyapunovDivergence:
      return "LyapunovDivergence";
    case ErrorCode::kAllHorizonsInfeasible:
      return "AllHorizonsInfeasible";
    case ErrorCode::kInvalidProblem:
      return "InvalidProblem";
    case ErrorCode::kNumericalFailure:
      return "NumericalFailure";
  }
  return "Unknown";
}

}  // namespace rmpc
