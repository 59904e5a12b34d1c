#include "rmpc/qp.hpp"

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "rmpc/error.hpp"

namespace rmpc {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

SparseMatrix sparse(const MatrixXd& m) { return m.sparseView(); }

TEST(SolveQp, ScalarLowerBound) {
  QuadraticProgram p = QuadraticProgram::with_variables(1);
  p.Q = sparse(MatrixXd::Constant(1, 1, 2.0));
  p.G = sparse(MatrixXd::Constant(1, 1, -1.0));
  p.h = VectorXd::Constant(1, -1.0);
  const SolveOutcome out = solve_qp(p);
  ASSERT_EQ(out.status, SolveStatus::kOptimal);
  EXPECT_NEAR(out.x[0], 1.0, 1e-8);
  EXPECT_NEAR(out.objective, 1.0, 1e-8);
  EXPECT_NEAR(out.objective, p.objective(out.x), 1e-12);
}

TEST(SolveQp, ContradictoryBoundsAreInfeasibleWithCertificate) {
  QuadraticProgram p = QuadraticProgram::with_variables(1);
  MatrixXd G(2, 1);
  G << 1.0, -1.0;
  p.G = sparse(G);
  p.h = Eigen::Vector2d(0.0, -1.0);
  const SolveOutcome out = solve_qp(p);
  ASSERT_EQ(out.status, SolveStatus::kInfeasible);
  const CertificateCheck check = check_certificate(p, out);
  EXPECT_TRUE(check.valid());
  EXPECT_LE(check.stationarity, 1e-8);
  EXPECT_LT(check.value, 0.0);
}

TEST(SolveQp, EqualityConstrained) {
  // min x² + y² s.t. x + y = 2 → (1, 1), objective ½·2·2 = 2.
  QuadraticProgram p = QuadraticProgram::with_variables(2);
  p.Q = sparse(2.0 * MatrixXd::Identity(2, 2));
  p.A = sparse(MatrixXd::Ones(1, 2));
  p.b = VectorXd::Constant(1, 2.0);
  const SolveOutcome out = solve_qp(p);
  ASSERT_EQ(out.status, SolveStatus::kOptimal);
  EXPECT_NEAR(out.x[0], 1.0, 1e-8);
  EXPECT_NEAR(out.x[1], 1.0, 1e-8);
  EXPECT_NEAR(out.objective, 2.0, 1e-8);
}

TEST(SolveQp, InconsistentEqualitiesAreInfeasible) {
  QuadraticProgram p = QuadraticProgram::with_variables(2);
  MatrixXd A(2, 2);
  A << 1, 1, 1, 1;
  p.A = sparse(A);
  p.b = Eigen::Vector2d(1.0, 2.0);
  const SolveOutcome out = solve_qp(p);
  ASSERT_EQ(out.status, SolveStatus::kInfeasible);
  EXPECT_TRUE(check_certificate(p, out).valid());
}

TEST(SolveQp, RejectsIndefiniteHessian) {
  QuadraticProgram p = QuadraticProgram::with_variables(2);
  MatrixXd Q(2, 2);
  Q << 1, 0, 0, -1;
  p.Q = sparse(Q);
  EXPECT_THROW(solve_qp(p), Error);
}

TEST(SolveQp, RejectsMismatchedDimensions) {
  QuadraticProgram p = QuadraticProgram::with_variables(2);
  p.G = sparse(MatrixXd::Ones(1, 3));
  p.h = VectorXd::Ones(1);
  EXPECT_THROW(solve_qp(p), Error);
}

// Projected gradient on a box, run to convergence, as an independent oracle.
VectorXd projected_gradient(const MatrixXd& Q, const VectorXd& q,
                            const VectorXd& lo, const VectorXd& hi) {
  const double L = Eigen::SelfAdjointEigenSolver<MatrixXd>(Q)
                       .eigenvalues()
                       .maxCoeff();
  VectorXd x = VectorXd::Zero(q.size());
  for (int it = 0; it < 200000; ++it) {
    const VectorXd next =
        (x - (Q * x + q) / L).cwiseMax(lo).cwiseMin(hi);
    if ((next - x).lpNorm<Eigen::Infinity>() < 1e-14) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

TEST(SolveQp, MatchesProjectedGradientOnRandomBoxes) {
  std::mt19937 rng(7);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 5;
    MatrixXd F = MatrixXd::NullaryExpr(n, n, [&] { return normal(rng); });
    MatrixXd Q = F * F.transpose() + 0.1 * MatrixXd::Identity(n, n);
    VectorXd q = VectorXd::NullaryExpr(n, [&] { return 3.0 * normal(rng); });
    VectorXd lo = -VectorXd::Ones(n);
    VectorXd hi = VectorXd::Ones(n);

    QuadraticProgram p = QuadraticProgram::with_variables(n);
    p.Q = sparse(Q);
    p.q = q;
    MatrixXd G(2 * n, n);
    G << MatrixXd::Identity(n, n), -MatrixXd::Identity(n, n);
    p.G = sparse(G);
    p.h = VectorXd::Ones(2 * n);
    const SolveOutcome out = solve_qp(p);
    ASSERT_EQ(out.status, SolveStatus::kOptimal);
    const VectorXd ref = projected_gradient(Q, q, lo, hi);
    const double ref_obj = 0.5 * ref.dot(Q * ref) + q.dot(ref);
    EXPECT_NEAR(out.objective, ref_obj, 1e-6) << "trial " << trial;
    EXPECT_LE((G * out.x - p.h).maxCoeff(), 1e-8);
  }
}

TEST(SolveLp, IntervalMaximum) {
  MatrixXd G(2, 1);
  G << 1, -1;
  const SolveOutcome out =
      solve_lp(VectorXd::Constant(1, -1.0), G, Eigen::Vector2d(1.0, 1.0));
  ASSERT_EQ(out.status, SolveStatus::kOptimal);
  EXPECT_NEAR(-out.objective, 1.0, 1e-9);
}

TEST(SolveLp, EmptyFeasibleSet) {
  MatrixXd G(2, 1);
  G << 1, -1;
  const SolveOutcome out =
      solve_lp(VectorXd::Constant(1, -1.0), G, Eigen::Vector2d(-1.0, -1.0));
  EXPECT_EQ(out.status, SolveStatus::kInfeasible);
}

TEST(SolveLp, SimplexMatchesVertexEnumeration) {
  MatrixXd G(3, 2);
  G << 1, 1, -1, 0, 0, -1;
  const Eigen::Vector3d h(1, 0, 0);
  const Eigen::Vector2d c(2, 1);
  double best = -1e300;
  for (const Eigen::Vector2d v : {Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0),
                                  Eigen::Vector2d(0, 1)}) {
    best = std::max(best, c.dot(v));
  }
  const SolveOutcome out = solve_lp(-c, G, h);
  ASSERT_EQ(out.status, SolveStatus::kOptimal);
  EXPECT_NEAR(-out.objective, best, 1e-9);
  EXPECT_NEAR(best, 2.0, 0.0);
}

TEST(SolveLp, UnboundedIsDistinguishedFromInfeasible) {
  MatrixXd G(1, 2);
  G << -1, 0;
  const SolveOutcome out =
      solve_lp(Eigen::Vector2d(-1.0, 0.0), G, VectorXd::Zero(1));
  ASSERT_EQ(out.status, SolveStatus::kUnbounded);
  EXPECT_LT(Eigen::Vector2d(-1.0, 0.0).dot(out.ray), 0.0);
  EXPECT_LE((G * out.ray).maxCoeff(), 1e-9);
}

TEST(SolveLp, DegenerateSingletonFeasibleSet) {
  // x ≤ 1, x ≥ 1: feasible set is a point.
  MatrixXd G(2, 1);
  G << 1, -1;
  const SolveOutcome out =
      solve_lp(VectorXd::Constant(1, 1.0), G, Eigen::Vector2d(1.0, -1.0));
  ASSERT_EQ(out.status, SolveStatus::kOptimal);
  EXPECT_NEAR(out.x[0], 1.0, 1e-8);
}

TEST(SolveQp, InfeasibleVerdictsAlwaysCarryValidCertificates) {
  std::mt19937 rng(11);
  std::normal_distribution<double> normal;
  int infeasible = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 3;
    const int m = 3 + trial % 6;
    MatrixXd G = MatrixXd::NullaryExpr(m, n, [&] { return normal(rng); });
    VectorXd h = VectorXd::NullaryExpr(m, [&] { return normal(rng) - 0.5; });
    QuadraticProgram p = QuadraticProgram::with_variables(n);
    p.Q = sparse(MatrixXd::Identity(n, n));
    p.G = sparse(G);
    p.h = h;
    const SolveOutcome out = solve_qp(p);
    ASSERT_NE(out.status, SolveStatus::kNumericalFailure) << "trial " << trial;
    if (out.status == SolveStatus::kInfeasible) {
      ++infeasible;
      EXPECT_TRUE(check_certificate(p, out).valid()) << "trial " << trial;
    } else {
      EXPECT_LE((G * out.x - h).maxCoeff(), 1e-8) << "trial " << trial;
    }
  }
  EXPECT_GT(infeasible, 10);
}

TEST(SolveQp, Deterministic) {
  QuadraticProgram p = QuadraticProgram::with_variables(3);
  p.Q = sparse(MatrixXd::Identity(3, 3));
  p.q = Eigen::Vector3d(1, -2, 0.5);
  p.G = sparse(MatrixXd::Ones(1, 3));
  p.h = VectorXd::Constant(1, 0.3);
  const SolveOutcome a = solve_qp(p);
  const SolveOutcome b = solve_qp(p);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.x, b.x);
}

}  // namespace
}  // namespace rmpc
