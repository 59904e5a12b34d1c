#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rmpc/geometry.hpp"

namespace rmpc {

/// x⁺ = (Ā + Δ_A) x + (B̄ + Δ_B) u + w with Δ_A, Δ_B in the convex hulls of
/// the given vertex matrices and w ∈ W.
struct UncertainSystem {
  Eigen::MatrixXd A_bar;
  Eigen::MatrixXd B_bar;
  std::vector<Eigen::MatrixXd> deltaA_vertices;
  std::vector<Eigen::MatrixXd> deltaB_vertices;
  Polytope W;
  Polytope X;
  Polytope U;

  Eigen::Index state_dim() const { return A_bar.rows(); }
  Eigen::Index input_dim() const { return B_bar.cols(); }

  /// Shapes, vertex counts, and compactness of X, U, W with the origin in the
  /// interior. Throws Error(kDimensionMismatch / kInvalidProblem /
  /// kUnboundedConstraintSet).
  void validate() const;

  /// (Ā + Δ_A^(j)) + (B̄ + Δ_B^(k)) K for every vertex pair, j-major.
  std::vector<Eigen::MatrixXd> closed_loop_vertices(const Eigen::MatrixXd& K) const;

  Eigen::MatrixXd nominal_closed_loop(const Eigen::MatrixXd& K) const {
    return A_bar + B_bar * K;
  }
};

/// ∞-norm bound on the lumped term w̃ = Δ_A x + Δ_B u + w over X × U × W.
struct NetAdditiveBound {
  double w_tilde_max = 0.0;
  double x_max = 0.0;
  double u_max = 0.0;
  double w_max = 0.0;
  double dA_norm = 0.0;
  double dB_norm = 0.0;
};

/// max_x∈P ‖x‖∞ from coordinate supports. Throws
/// Error(kUnboundedConstraintSet).
double max_inf_norm(const Polytope& P);

NetAdditiveBound net_additive_bound(const UncertainSystem& sys);

struct UncertaintyRealization {
  Eigen::MatrixXd deltaA_true;
  Eigen::MatrixXd deltaB_true;
  Eigen::VectorXd weights_A;
  Eigen::VectorXd weights_B;
  std::vector<Eigen::VectorXd> w_sequence;

  Eigen::MatrixXd A_true(const UncertainSystem& sys) const {
    return sys.A_bar + deltaA_true;
  }
  Eigen::MatrixXd B_true(const UncertainSystem& sys) const {
    return sys.B_bar + deltaB_true;
  }
};

enum class SamplingMode {
  kUniform,      // simplex weights, interior disturbances
  kAdversarial,  // a single vertex pair, disturbances at corners of W
};

/// Deterministic in (sys, horizon, seed, mode).
UncertaintyRealization sample_realization(const UncertainSystem& sys, int horizon,
                                          std::uint64_t seed,
                                          SamplingMode mode = SamplingMode::kUniform);

/// Zero parametric mismatch and zero disturbance.
UncertaintyRealization zero_realization(const UncertainSystem& sys, int horizon);

/// Weights nonnegative and summing to one, matrices equal to the stated
/// combinations, every w inside W.
bool realization_is_admissible(const UncertainSystem& sys,
                               const UncertaintyRealization& r, double tol = 1e-9);

}  // namespace rmpc
