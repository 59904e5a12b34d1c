#include "rmpc/geometry.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rmpc/error.hpp"
#include "test_support.hpp"

namespace rmpc {
namespace {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;
using testing::interval;
using testing::scalar;
using testing::vec;

Polytope simplex2() {
  MatrixXd H(3, 2);
  H << 1, 1, -1, 0, 0, -1;
  return Polytope(H, vec({1, 0, 0}));
}

// Same set as a box, but written so the closed-form box path is bypassed.
Polytope rotated_square() {
  MatrixXd H(4, 2);
  H << 1, 1, 1, -1, -1, 1, -1, -1;
  return Polytope(H, vec({1, 1, 1, 1}));
}

TEST(Support, UnitBox) {
  const Polytope box = Polytope::cube(2, 1.0);
  EXPECT_DOUBLE_EQ(box.support(vec({1, 0})), 1.0);
  EXPECT_DOUBLE_EQ(box.support(vec({1, 1})), 2.0);
}

TEST(Support, SimplexMatchesVertexEnumeration) {
  const Vector2d c(2, 1);
  double best = -1e300;
  for (const Vector2d v : {Vector2d(0, 0), Vector2d(1, 0), Vector2d(0, 1)}) {
    best = std::max(best, c.dot(v));
  }
  EXPECT_NEAR(simplex2().support(c), best, 1e-9);
}

TEST(Support, LpPathAgreesWithClosedForm) {
  // |x|+|y| ≤ 1 has support max(|c1|,|c2|).
  EXPECT_NEAR(rotated_square().support(vec({0.3, -2.0})), 2.0, 1e-9);
}

TEST(Support, ErrorsOnEmptyAndUnbounded) {
  MatrixXd H(2, 1);
  H << 1, -1;
  const Polytope empty(H, vec({-1, -1}));
  try {
    empty.support(vec({1}));
    FAIL() << "expected EmptyPolytope";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyPolytope);
  }
  const Polytope halfline(scalar(-1), vec({0}));
  try {
    halfline.support(vec({1}));
    FAIL() << "expected Unbounded";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnbounded);
  }
}

TEST(Support, BoxSupportsAddUnderMinkowskiSum) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const VectorXd lo1 = vec({u(rng) - 2, u(rng) - 2});
    const VectorXd hi1 = vec({u(rng) + 2, u(rng) + 2});
    const VectorXd lo2 = vec({u(rng) - 2, u(rng) - 2});
    const VectorXd hi2 = vec({u(rng) + 2, u(rng) + 2});
    // Box P ⊕ Q is the box with summed bounds; compare via the LP path.
    const Polytope sum = Polytope::box(lo1 + lo2, hi1 + hi2);
    const Polytope sum_lp(sum.H() * 1.0, sum.h());
    const VectorXd c = vec({u(rng), u(rng)});
    const double lhs = Polytope::box(lo1, hi1).support(c) +
                       Polytope::box(lo2, hi2).support(c);
    MatrixXd H = sum.H();
    H.conservativeResize(H.rows() + 1, Eigen::NoChange);
    H.row(H.rows() - 1) = vec({1, 1}).transpose();
    VectorXd h = sum.h();
    h.conservativeResize(h.size() + 1);
    h[h.size() - 1] = 1e6;  // inactive row forces the LP route
    EXPECT_NEAR(Polytope(H, h).support(c), lhs, 1e-8);
  }
}

TEST(IsSubset, Boxes) {
  EXPECT_TRUE(is_subset(Polytope::cube(2, 1), Polytope::cube(2, 2)));
  EXPECT_FALSE(is_subset(Polytope::cube(2, 2), Polytope::cube(2, 1)));
  EXPECT_TRUE(is_subset(simplex2(), Polytope::cube(2, 1)));
}

TEST(IsSubset, DimensionMismatchThrows) {
  EXPECT_THROW(is_subset(Polytope::cube(2, 1), Polytope::cube(3, 1)), Error);
}

TEST(RemoveRedundant, ScalarKeepsTightestUpperAndLowerBound) {
  MatrixXd H(3, 1);
  H << 1, 1, -1;
  const Polytope reduced = remove_redundant(Polytope(H, vec({1, 2, 1})));
  ASSERT_EQ(reduced.num_facets(), 2);
  EXPECT_EQ(reduced.H()(0, 0), 1.0);
  EXPECT_EQ(reduced.h()[0], 1.0);
  EXPECT_EQ(reduced.H()(1, 0), -1.0);
}

TEST(RemoveRedundant, DuplicatedFacet) {
  const Polytope box = Polytope::cube(2, 1);
  MatrixXd H(5, 2);
  H << box.H(), box.H().row(0);
  VectorXd h(5);
  h << box.h(), box.h()[0];
  EXPECT_EQ(remove_redundant(Polytope(H, h)).num_facets(), 4);
}

Polytope random_polytope(std::mt19937& rng, int facets) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> offset(0.5, 2.0);
  MatrixXd H(facets, 2);
  VectorXd h(facets);
  for (int i = 0; i < facets; ++i) {
    H.row(i) = vec({normal(rng), normal(rng)}).transpose();
    h[i] = offset(rng);
  }
  // Keep it bounded.
  return Polytope(H, h).intersect(Polytope::cube(2, 5.0));
}

TEST(RemoveRedundant, RandomPolytopesKeepTheSameSet) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Polytope P = random_polytope(rng, 8);
    const Polytope R = remove_redundant(P);
    EXPECT_LE(R.num_facets(), P.num_facets());
    EXPECT_TRUE(is_subset(P, R));
    EXPECT_TRUE(is_subset(R, P));
    // Every survivor is needed: dropping it strictly enlarges the set.
    for (Eigen::Index i = 0; i < R.num_facets(); ++i) {
      MatrixXd H(R.num_facets() - 1, 2);
      VectorXd h(R.num_facets() - 1);
      for (Eigen::Index j = 0, k = 0; j < R.num_facets(); ++j) {
        if (j == i) continue;
        H.row(k) = R.H().row(j);
        h[k++] = R.h()[j];
      }
      EXPECT_FALSE(is_subset(Polytope(H, h), R)) << "row " << i;
    }
  }
}

TEST(RemoveRedundant, Idempotent) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Polytope once = remove_redundant(random_polytope(rng, 10));
    const Polytope twice = remove_redundant(once);
    EXPECT_EQ(once.H(), twice.H());
    EXPECT_EQ(once.h(), twice.h());
  }
}

TEST(RemoveRedundant, EmptyThrows) {
  MatrixXd H(2, 1);
  H << 1, -1;
  EXPECT_THROW(remove_redundant(Polytope(H, vec({-1, -1}))), Error);
}

TEST(PreSet, ScalarContractionWithDisturbance) {
  const std::vector<MatrixXd> a{scalar(0.5)};
  const auto pre = pre_set(interval(-1, 1), a, interval(-0.25, 0.25),
                           interval(-1, 1));
  ASSERT_TRUE(pre.has_value());
  EXPECT_NEAR(pre->support(vec({1})), 1.0, 1e-9);
  EXPECT_NEAR(pre->support(vec({-1})), 1.0, 1e-9);
}

TEST(PreSet, ScalarPureScaling) {
  const std::vector<MatrixXd> a{scalar(0.5)};
  const auto pre = pre_set(interval(-1, 1), a, interval(0, 0), interval(-10, 10));
  ASSERT_TRUE(pre.has_value());
  EXPECT_NEAR(pre->support(vec({1})), 2.0, 1e-9);
  EXPECT_NEAR(pre->support(vec({-1})), 2.0, 1e-9);
}

TEST(PreSet, IntersectsPerVertexPredecessors) {
  const std::vector<MatrixXd> a{scalar(0.5), scalar(-0.5)};
  const auto pre = pre_set(interval(-1, 1), a, interval(0, 0), interval(-10, 10));
  ASSERT_TRUE(pre.has_value());
  EXPECT_NEAR(pre->support(vec({1})), 2.0, 1e-9);
  EXPECT_NEAR(pre->support(vec({-1})), 2.0, 1e-9);
}

TEST(PreSet, EmptyResultIsFlaggedNotThrown) {
  const std::vector<MatrixXd> a{scalar(1.0)};
  EXPECT_FALSE(pre_set(interval(-1, 1), a, interval(-2, 2), interval(-1, 1)));
}

TEST(PreSet, OutputLiesInsideConstraints) {
  std::mt19937 rng(13);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<MatrixXd> a{0.4 * MatrixXd::NullaryExpr(2, 2, [&] { return normal(rng); })};
    const Polytope X = random_polytope(rng, 6);
    const auto pre = pre_set(Polytope::cube(2, 1.0), a, Polytope::cube(2, 0.05), X);
    if (pre) EXPECT_TRUE(is_subset(*pre, X));
  }
}

TEST(PreSet, IdentityWithoutDisturbanceIsIntersection) {
  std::mt19937 rng(17);
  const Polytope S = random_polytope(rng, 6);
  const Polytope X = random_polytope(rng, 6);
  const std::vector<MatrixXd> a{MatrixXd::Identity(2, 2)};
  const auto pre = pre_set(S, a, Polytope::cube(2, 0.0), X);
  ASSERT_TRUE(pre.has_value());
  const Polytope both = S.intersect(X);
  EXPECT_TRUE(is_subset(*pre, both));
  EXPECT_TRUE(is_subset(both, *pre));
}

TEST(MaxRobustInvariant, ScalarFixedPoint) {
  const std::vector<MatrixXd> a{scalar(0.5)};
  const auto omega =
      max_robust_invariant(interval(-1, 1), a, interval(-0.25, 0.25));
  ASSERT_TRUE(omega.has_value());
  EXPECT_NEAR(omega->support(vec({1})), 1.0, 1e-9);
  EXPECT_NEAR(omega->support(vec({-1})), 1.0, 1e-9);
}

TEST(MaxRobustInvariant, ScalarEmptyWhenDisturbanceTooLarge) {
  // Minimal invariant set [−1.2, 1.2] does not fit in [−1, 1].
  const std::vector<MatrixXd> a{scalar(0.5)};
  EXPECT_FALSE(
      max_robust_invariant(interval(-1, 1), a, interval(-0.6, 0.6)).has_value());
}

TEST(MaxRobustInvariant, NominalContraction) {
  const std::vector<MatrixXd> a{scalar(0.5)};
  const auto omega = max_robust_invariant(interval(-1, 1), a, interval(0, 0));
  ASSERT_TRUE(omega.has_value());
  EXPECT_NEAR(omega->support(vec({1})), 1.0, 1e-9);
}

TEST(MaxRobustInvariant, NoConvergenceIsReported) {
  const std::vector<MatrixXd> a{scalar(0.99)};
  try {
    max_robust_invariant(interval(-1, 1), a, interval(-0.0099, 0.0099), 3);
    SUCCEED();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoConvergence);
  }
  // A rotation-like system whose constraint set shrinks over many sweeps.
  MatrixXd rot(2, 2);
  rot << 0.9 * std::cos(0.3), -0.9 * std::sin(0.3), 0.9 * std::sin(0.3),
      0.9 * std::cos(0.3);
  MatrixXd H(1, 2);
  const std::vector<MatrixXd> r{rot};
  MatrixXd CH(5, 2);
  CH << 1, 0, -1, 0, 0, 1, 0, -1, 1, 1;
  const Polytope C(CH, vec({1, 1, 10, 10, 0.2}));
  EXPECT_THROW(max_robust_invariant(C, r, Polytope::cube(2, 0.01), 1), Error);
}

TEST(MaxRobustInvariant, SampledSuccessorsStayInside) {
  MatrixXd A1(2, 2), A2(2, 2);
  A1 << 0.8, 0.2, -0.1, 0.7;
  A2 << 0.7, 0.3, -0.2, 0.8;
  const std::vector<MatrixXd> a{A1, A2};
  const Polytope W = Polytope::cube(2, 0.1);
  const auto omega = max_robust_invariant(Polytope::cube(2, 1.0), a, W);
  ASSERT_TRUE(omega.has_value());
  std::mt19937 rng(21);
  const auto xs = testing::sample_inside(*omega, 1000, rng);
  ASSERT_EQ(xs.size(), 1000u);
  for (const auto& x : xs) {
    for (const auto& A : a) {
      for (double w1 : {-0.1, 0.1}) {
        for (double w2 : {-0.1, 0.1}) {
          EXPECT_TRUE(omega->contains(A * x + vec({w1, w2}), kFacetTol));
        }
      }
    }
  }
}

TEST(Hull2d, UnitSquare) {
  const auto hull = hull_2d({Vector2d(0, 0), Vector2d(1, 0), Vector2d(1, 1),
                             Vector2d(0, 1)});
  EXPECT_EQ(hull.hull.size(), 4u);
  EXPECT_DOUBLE_EQ(hull.area, 1.0);
}

TEST(Hull2d, InteriorPointIgnored) {
  const auto hull = hull_2d({Vector2d(0, 0), Vector2d(1, 0), Vector2d(1, 1),
                             Vector2d(0, 1), Vector2d(0.5, 0.5)});
  EXPECT_EQ(hull.hull.size(), 4u);
  EXPECT_DOUBLE_EQ(hull.area, 1.0);
}

TEST(Hull2d, CollinearInputHasZeroArea) {
  const auto hull = hull_2d({Vector2d(0, 0), Vector2d(1, 1), Vector2d(2, 2)});
  EXPECT_DOUBLE_EQ(hull.area, 0.0);
}

TEST(Hull2d, RandomPointsAreContained) {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vector2d> pts;
  for (int i = 0; i < 100; ++i) pts.emplace_back(u(rng), u(rng));
  const auto hull = hull_2d(pts);
  const size_t n = hull.hull.size();
  ASSERT_GE(n, 3u);
  for (const auto& p : pts) {
    for (size_t i = 0; i < n; ++i) {
      const Vector2d e = hull.hull[(i + 1) % n] - hull.hull[i];
      const Vector2d r = p - hull.hull[i];
      EXPECT_GE(e.x() * r.y() - e.y() * r.x(), -1e-12);
    }
  }
  EXPECT_NEAR(hull.area, polygon_area(hull.hull), 0.0);
}

TEST(Vertices2d, RecoversSquareCorners) {
  const auto v = vertices_2d(rotated_square());
  ASSERT_EQ(v.size(), 4u);
  EXPECT_NEAR(polygon_area(v), 2.0, 1e-12);
}

TEST(MutualInclusion, SupportFunctionsAgree) {
  std::mt19937 rng(29);
  std::normal_distribution<double> normal;
  const Polytope P = random_polytope(rng, 9);
  const Polytope R = remove_redundant(P);
  ASSERT_TRUE(is_subset(P, R) && is_subset(R, P));
  for (int k = 0; k < 100; ++k) {
    const VectorXd c = vec({normal(rng), normal(rng)});
    EXPECT_NEAR(P.support(c), R.support(c), 1e-7);
  }
}

}  // namespace
}  // namespace rmpc
