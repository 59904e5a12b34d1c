#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "rmpc/system.hpp"

namespace rmpc {

/// Everything a problem-description file carries.
struct Problem {
  std::string name;
  UncertainSystem sys;
  Eigen::MatrixXd P;
  Eigen::MatrixXd R;
  Eigen::MatrixXd K;
  int N = 1;
  std::uint64_t seed = 0;
  int steps = 50;
  /// Optional gain stored for reference only; never used by the controller.
  std::optional<Eigen::MatrixXd> reference_gain;
};

/// Parses and validates a JSON problem description. Every failure is an
/// Error whose message starts with the offending field path, e.g.
/// "X.box.lo: expected 2 entries, got 3".
Problem parse_problem(const std::string& text);

Problem load_problem(const std::filesystem::path& path);

/// Stable 64-bit FNV-1a digest of a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace rmpc
