#pragma once

#include <Eigen/Dense>

#include "rmpc/controller.hpp"

namespace rmpc {

/// Fixed-horizon tube MPC that lumps all uncertainty into the ∞-ball of
/// radius w̃_max, including in the terminal set.
struct BaselineConfig {
  Eigen::MatrixXd P;
  Eigen::MatrixXd R;
  Eigen::MatrixXd K;
  Eigen::MatrixXd P_N;
  int N = 1;
  Polytope X_N_lump;
  NetAdditiveBound bound;
};

/// Maximal invariant set of x⁺ = (Ā + B̄K) x + w̃, ‖w̃‖∞ ≤ w̃_max, inside
/// X ∩ {x : Kx ∈ U}. Throws Error(kEmptyTerminalSet).
Polytope lumped_terminal_set(const UncertainSystem& sys, const Eigen::MatrixXd& K,
                             double w_tilde_max, int max_iter = 500);

/// Reuses the proposed controller's K, P_N, cost weights and horizon.
BaselineConfig make_baseline(const UncertainSystem& sys, const MPCConfig& cfg);

MPCSolution baseline_solve(const UncertainSystem& sys, const BaselineConfig& cfg,
                           const Eigen::VectorXd& x);

}  // namespace rmpc
