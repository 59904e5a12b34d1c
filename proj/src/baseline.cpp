#include "rmpc/baseline.hpp"

#include <chrono>

#include "rmpc/error.hpp"

namespace rmpc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Polytope lumped_terminal_set(const UncertainSystem& sys, const MatrixXd& K,
                             double w_tilde_max, int max_iter) {
  const std::vector<MatrixXd> nominal{sys.nominal_closed_loop(K)};
  const Polytope constraints = sys.X.intersect(sys.U.preimage(K));
  std::optional<Polytope> omega = max_robust_invariant(
      constraints, nominal, Polytope::cube(sys.state_dim(), w_tilde_max), max_iter);
  if (!omega) {
    throw Error(ErrorCode::kEmptyTerminalSet,
                "lumped invariant set is empty for w_tilde_max " + std::to_string(w_tilde_max));
  }
  return *omega;
}

BaselineConfig make_baseline(const UncertainSystem& sys, const MPCConfig& cfg) {
  BaselineConfig b;
  b.P = cfg.P;
  b.R = cfg.R;
  b.K = cfg.terminal.K;
  b.P_N = cfg.terminal.P_N;
  b.N = cfg.N;
  b.bound = cfg.bound;
  b.X_N_lump = lumped_terminal_set(sys, b.K, b.bound.w_tilde_max);
  return b;
}

MPCSolution baseline_solve(const UncertainSystem& sys, const BaselineConfig& cfg,
                           const VectorXd& x) {
  const auto start = std::chrono::steady_clock::now();
  const HorizonProblem hp =
      build_lumped(sys, cfg.P, cfg.R, cfg.P_N, cfg.X_N_lump, cfg.bound.w_tilde_max, x, cfg.N);
  MPCSolution sol = solve_horizon(hp);
  sol.per_horizon.front().solve_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

}  // namespace rmpc
