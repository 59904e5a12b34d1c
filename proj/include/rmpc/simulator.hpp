#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rmpc/baseline.hpp"
#include "rmpc/controller.hpp"
#include "rmpc/geometry.hpp"
#include "rmpc/system.hpp"

namespace rmpc {

struct StepRecord {
  int N_star = 0;
  double J_star = 0.0;
  double solve_time = 0.0;
  double state_margin = 0.0;  // min(h^x − H^x x_t)
  double input_margin = 0.0;  // min(h^u − H^u u_t)
  double margin = 0.0;        // min of the two
  // J⋆(x_{t+1}) − q(x_{t+1}) and the tolerance it is held against; NaN
  // when the check does not apply (rollout, or no solve at t+1).
  double iss_gap = 0.0;
  double iss_tol = 0.0;
};

struct SimulationTrace {
  std::vector<Eigen::VectorXd> states;   // x_0 … x_T
  std::vector<Eigen::VectorXd> inputs;   // u_0 … u_{T−1}
  std::vector<Eigen::VectorXd> w_tilde;  // reconstructed x⁺ − Āx − B̄u
  std::vector<StepRecord> steps;

  int infeasible_step = -1;       // first step without a feasible horizon
  bool numerical_failure = false;
  int state_violations = 0;       // margins below −tol, states x_0 … x_T
  int input_violations = 0;
  int iss_violations = 0;
  int iss_checks = 0;

  bool infeasible() const { return infeasible_step >= 0; }
  bool clean() const {
    return !infeasible() && !numerical_failure && state_violations == 0 &&
           input_violations == 0 && iss_violations == 0;
  }
};

struct SimulationOptions {
  double margin_tol = 1e-6;
  bool check_iss = true;
};

/// Receding-horizon closed loop x⁺ = A_true x + B_true u + w with the
/// adaptive-horizon controller. Never throws on infeasibility or
/// violations; those end the run and are flagged in the trace.
SimulationTrace simulate_closed_loop(const UncertainSystem& sys, const MPCConfig& cfg,
                                     const Eigen::VectorXd& x0, int steps,
                                     const UncertaintyRealization& realization,
                                     const SimulationOptions& options = {});

/// Solves once at x0 and then follows the roll-out policy without re-solving.
SimulationTrace simulate_rollout(const UncertainSystem& sys, const MPCConfig& cfg,
                                 const Eigen::VectorXd& x0, int steps,
                                 const UncertaintyRealization& realization,
                                 const SimulationOptions& options = {});

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Results must be
/// written by index; scheduling does not affect them.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn);

/// grid_n points per axis over X's bounding box (endpoints included), kept
/// when inside X.
std::vector<Eigen::VectorXd> state_grid(const Polytope& X, int grid_n);

struct ROAEstimate {
  std::vector<Eigen::VectorXd> grid;
  std::vector<bool> feasible_mask;
  std::vector<int> N_star;  // 0 where infeasible
  int numerical_failures = 0;
  std::optional<PointCloudHull2D> hull;  // d = 2 only
  double area = 0.0;

  int num_feasible() const;
};

ROAEstimate estimate_roa(const UncertainSystem& sys, const MPCConfig& cfg, int grid_n,
                         int jobs = 1);
ROAEstimate estimate_roa(const UncertainSystem& sys, const BaselineConfig& cfg, int grid_n,
                         int jobs = 1);

struct BenchmarkRow {
  int horizon = 0;
  int samples = 0;
  int optimal = 0;
  double mean = 0.0;    // seconds
  double median = 0.0;  // seconds
  double min = 0.0;
  double max = 0.0;
};

/// Build + solve time of each horizon problem at each state, reps times after
/// one untimed warm-up pass. Horizons beyond cfg.N are allowed.
std::vector<BenchmarkRow> benchmark(const UncertainSystem& sys, const MPCConfig& cfg,
                                    int first_horizon, int last_horizon, int reps,
                                    const std::vector<Eigen::VectorXd>& states);

/// Grid points where every horizon 1..cfg.N is feasible; the origin when
/// there are none.
std::vector<Eigen::VectorXd> benchmark_states(const UncertainSystem& sys,
                                              const MPCConfig& cfg, int grid_n);

}  // namespace rmpc
