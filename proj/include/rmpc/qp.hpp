#pragma once

#include <string_view>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace rmpc {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Convex QP in the convention
///
///   minimize    ½ xᵀQx + qᵀx
///   subject to  G x ≤ h,  A x = b.
///
/// Q must be symmetric positive semidefinite. Any of G/A may have zero rows.
struct QuadraticProgram {
  SparseMatrix Q;
  Eigen::VectorXd q;
  SparseMatrix G;
  Eigen::VectorXd h;
  SparseMatrix A;
  Eigen::VectorXd b;

  /// Empty program on n variables (Q = 0, no constraints).
  static QuadraticProgram with_variables(Eigen::Index n);

  Eigen::Index num_variables() const { return q.size(); }

  /// Throws Error(kInvalidProblem) on inconsistent sizes, asymmetric Q or a Q
  /// that fails a regularized LDLᵀ factorization with nonnegative pivots.
  void validate() const;

  double objective(const Eigen::VectorXd& x) const;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };

std::string_view to_string(SolveStatus status);

struct SolveOutcome {
  SolveStatus status = SolveStatus::kNumericalFailure;
  Eigen::VectorXd x;          // primal solution (kOptimal)
  Eigen::VectorXd z;          // inequality multipliers (kOptimal)
  Eigen::VectorXd y;          // equality multipliers (kOptimal)
  double objective = 0.0;     // ½xᵀQx + qᵀx at x (kOptimal)
  double solve_time = 0.0;    // seconds
  int iterations = 0;

  // kInfeasible: Farkas certificate. farkas_ineq ≥ 0 and
  //   Gᵀ farkas_ineq + Aᵀ farkas_eq = 0,  hᵀ farkas_ineq + bᵀ farkas_eq < 0.
  Eigen::VectorXd farkas_ineq;
  Eigen::VectorXd farkas_eq;

  // kUnbounded: a recession direction d with Qd = 0, Gd ≤ 0, Ad = 0, qᵀd < 0.
  Eigen::VectorXd ray;

  bool optimal() const { return status == SolveStatus::kOptimal; }
};

struct SolverSettings {
  double tol = 1e-10;           // relative KKT tolerance for convergence
  double feasibility_tol = 1e-9;  // phase-1 margin accepted as feasible
  int max_iterations = 60;
};

SolveOutcome solve_qp(const QuadraticProgram& prog,
                      const SolverSettings& settings = {});

/// minimize cᵀx subject to Gx ≤ h.
SolveOutcome solve_lp(const Eigen::VectorXd& c, const SparseMatrix& G,
                      const Eigen::VectorXd& h,
                      const SolverSettings& settings = {});

SolveOutcome solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& G,
                      const Eigen::VectorXd& h,
                      const SolverSettings& settings = {});

/// Max-abs residual of the Farkas system, and the (should-be-negative)
/// value hᵀy + bᵀv. Exposed for tests and callers that re-check verdicts.
struct CertificateCheck {
  double stationarity = 0.0;   // ‖Gᵀy + Aᵀv‖∞
  double min_multiplier = 0.0; // min(y), expected ≥ 0
  double value = 0.0;          // hᵀy + bᵀv, expected < 0
  bool valid(double tol = 1e-8) const;
};

CertificateCheck check_certificate(const QuadraticProgram& prog,
                                   const SolveOutcome& outcome);

}  // namespace rmpc
