#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rmpc {

enum class ErrorCode {
  kEmptyPolytope,
  kUnbounded,
  kDimensionMismatch,
  kNoConvergence,
  kUnboundedConstraintSet,
  kHistoryLengthMismatch,
  kVertexUnstable,
  kEmptyTerminalSet,
  kLyapunovDivergence,
  kAllHorizonsInfeasible,
  kInvalidProblem,
  kNumericalFailure,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rmpc
