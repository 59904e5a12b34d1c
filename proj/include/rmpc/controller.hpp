#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rmpc/geometry.hpp"
#include "rmpc/prediction.hpp"
#include "rmpc/qp.hpp"
#include "rmpc/system.hpp"

namespace rmpc {

struct Problem;

struct TerminalComponents {
  Eigen::MatrixXd K;
  Polytope X_N;
  Eigen::MatrixXd P_N;

  // Screening and verification diagnostics.
  double max_vertex_radius = 0.0;
  double max_sampled_radius = 0.0;
  double nominal_radius = 0.0;
  double lyapunov_residual = 0.0;   // λ_max(−P_N + P + KᵀRK + Ā_clᵀ P_N Ā_cl)
  double invariance_residual = 0.0; // max row violation of the invariance check
};

struct TerminalOptions {
  int hull_samples = 1000;
  std::uint64_t seed = 0;
  int max_iter = 500;
};

/// Throws Error(kVertexUnstable), Error(kEmptyTerminalSet),
/// Error(kLyapunovDivergence) or Error(kNoConvergence).
TerminalComponents synthesize_terminal(const UncertainSystem& sys,
                                       const Eigen::MatrixXd& K,
                                       const Eigen::MatrixXd& P,
                                       const Eigen::MatrixXd& R,
                                       const TerminalOptions& options = {});

/// Σ_k (Aᵀ)^k S A^k by doubling. Throws Error(kLyapunovDivergence) unless
/// the spectral radius of A is below one.
Eigen::MatrixXd lyapunov_series(const Eigen::MatrixXd& A, const Eigen::MatrixXd& S);

/// λ_max(−P_N + S + Aᵀ P_N A).
double lyapunov_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& S,
                         const Eigen::MatrixXd& P_N);

/// Largest violation of f·A x + supp_W(f) ≤ fh over X_N facets, vertex
/// matrices A and x ∈ X_N (≤ 0 means robustly invariant).
double invariance_violation(const Polytope& X_N, std::span<const Eigen::MatrixXd> closed_loop,
                            const Polytope& W);

double spectral_radius(const Eigen::MatrixXd& A);

struct MPCConfig {
  Eigen::MatrixXd P;
  Eigen::MatrixXd R;
  int N = 1;
  TerminalComponents terminal;
  NetAdditiveBound bound;
};

MPCConfig make_config(const Problem& problem, const TerminalOptions& options = {});

/// A horizon subproblem: QP plus the constant dropped from its objective and
/// the variable layout needed to read back (ū, M).
class HorizonProblem {
 public:
  QuadraticProgram qp;
  double constant = 0.0;
  int horizon = 1;
  Eigen::Index m = 0;
  Eigen::Index d = 0;

  Eigen::VectorXd u_bar(const Eigen::VectorXd& z) const { return z.head(m * horizon); }
  FeedbackGainStack gains(const Eigen::VectorXd& z) const;

  /// Decision vector for fixed (ū, M) with every auxiliary variable at its
  /// smallest feasible value (the absolute value it bounds).
  Eigen::VectorXd pack(const Eigen::VectorXd& u_bar, const FeedbackGainStack& M) const;

  /// Left-hand side of each robust row written as "value ≤ bound", evaluated
  /// through the QP rows at pack(ū, M). Case-1 problems report their plain rows.
  Eigen::VectorXd robust_row_values(const Eigen::VectorXd& u_bar,
                                    const FeedbackGainStack& M) const;
  Eigen::VectorXd robust_row_bounds() const;

  /// Number of robust rows on predicted states (first block) and inputs.
  Eigen::Index num_state_rows() const { return static_cast<Eigen::Index>(state_rows_.size()); }
  Eigen::Index num_input_rows() const { return static_cast<Eigen::Index>(input_rows_.size()); }

  struct RowInfo {
    Eigen::Index qp_row = 0;   // row of qp.G
    double offset = 0.0;       // value = G_row z + offset
    double bound = 0.0;
  };

 private:
  friend HorizonProblem build_case1(const UncertainSystem&, const MPCConfig&,
                                    const Eigen::VectorXd&);
  friend HorizonProblem build_lumped(const UncertainSystem&, const Eigen::MatrixXd&,
                                     const Eigen::MatrixXd&, const Eigen::MatrixXd&,
                                     const Polytope&, double, const Eigen::VectorXd&, int);

  std::vector<std::pair<int, int>> gain_blocks_;  // (k, l) in variable order
  Eigen::Index gain_offset_ = 0;
  Eigen::Index aux_offset_ = 0;
  std::vector<Eigen::Index> aux_source_row_;      // per aux: row of qp.G for v − a ≤ 0
  std::vector<RowInfo> state_rows_;
  std::vector<RowInfo> input_rows_;
};

/// Horizon-one problem with exact vertex-pair robustification.
HorizonProblem build_case1(const UncertainSystem& sys, const MPCConfig& cfg,
                           const Eigen::VectorXd& x);

/// Horizon-N problem with the ∞-ball lumped tightening; N ≥ 1. Shared by the
/// case-N controller problems and the baseline.
HorizonProblem build_lumped(const UncertainSystem& sys, const Eigen::MatrixXd& P,
                            const Eigen::MatrixXd& R, const Eigen::MatrixXd& P_N,
                            const Polytope& terminal_set, double w_tilde_max,
                            const Eigen::VectorXd& x, int horizon);

/// build_lumped with the configured terminal set; requires 2 ≤ N.
HorizonProblem build_caseN(const UncertainSystem& sys, const MPCConfig& cfg,
                           const Eigen::VectorXd& x, int horizon);

/// Cost of a nominal input stack: xᵀPx + Σ predicted stage costs + terminal.
double nominal_cost(const UncertainSystem& sys, const Eigen::MatrixXd& P,
                    const Eigen::MatrixXd& R, const Eigen::MatrixXd& P_N,
                    const Eigen::VectorXd& x, const Eigen::VectorXd& u_bar_stack);

struct HorizonResult {
  int horizon = 0;
  SolveStatus status = SolveStatus::kNumericalFailure;
  double cost = 0.0;
  double solve_time = 0.0;      // build + solve, seconds
  bool certificate_valid = false;  // kInfeasible only
};

struct MPCSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  int N_star = 0;
  Eigen::VectorXd u_bar_star;
  FeedbackGainStack M_star;
  double J_star = 0.0;
  std::vector<HorizonResult> per_horizon;

  bool optimal() const { return status == SolveStatus::kOptimal; }
  Eigen::VectorXd applied_input() const { return u_bar_star.head(M_star.input_dim()); }
};

/// Relative tolerance under which two horizon costs count as tied.
inline constexpr double kCostTieTol = 1e-9;

/// Solves every horizon 1..cfg.N and keeps the cheapest feasible one (ties go
/// to the shorter horizon). Status is kInfeasible when no horizon is feasible,
/// kNumericalFailure when none is feasible and some failed numerically.
MPCSolution adaptive_solve(const UncertainSystem& sys, const MPCConfig& cfg,
                           const Eigen::VectorXd& x);

/// Solution from one horizon problem.
MPCSolution solve_horizon(const HorizonProblem& problem);

/// First input of the adaptive solution. Throws Error(kAllHorizonsInfeasible)
/// (or kNumericalFailure) when no horizon is feasible.
Eigen::VectorXd mpc_step(const UncertainSystem& sys, const MPCConfig& cfg,
                         const Eigen::VectorXd& x, MPCSolution* solution = nullptr);

/// Candidate upper bound on J⋆(x_next) built from the solution at x:
/// the shifted policy for N⋆ ≥ 2, the terminal controller for N⋆ = 1.
double iss_candidate_cost(const UncertainSystem& sys, const MPCConfig& cfg,
                          const MPCSolution& sol, const Eigen::VectorXd& x_next,
                          const Eigen::VectorXd& w_tilde);

/// Net-additive residual x⁺ − Āx − B̄u.
Eigen::VectorXd reconstruct_disturbance(const UncertainSystem& sys,
                                        const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& u,
                                        const Eigen::VectorXd& x_next);

/// Time-0 policy followed open-loop, then the terminal feedback.
class RolloutPolicy {
 public:
  RolloutPolicy(const UncertainSystem& sys, MPCSolution solution, Eigen::MatrixXd K);

  /// states holds x_0 … x_t and inputs u_0 … u_{t−1}. Throws
  /// Error(kHistoryLengthMismatch) otherwise.
  Eigen::VectorXd input(int t, std::span<const Eigen::VectorXd> states,
                        std::span<const Eigen::VectorXd> inputs) const;

  int horizon() const { return solution_.N_star; }

 private:
  Eigen::MatrixXd A_bar_;
  Eigen::MatrixXd B_bar_;
  MPCSolution solution_;
  Eigen::MatrixXd K_;
};

}  // namespace rmpc
