#include "rmpc/system.hpp"

#include <random>

#include <gtest/gtest.h>

#include "rmpc/error.hpp"
#include "rmpc/problem.hpp"
#include <json.hpp>
#include "test_support.hpp"

namespace rmpc {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using testing::vec;

UncertainSystem make_2d(double dA, double dB, double x, double u, double w) {
  UncertainSystem s;
  s.A_bar = MatrixXd::Identity(2, 2);
  s.B_bar = MatrixXd::Ones(2, 1);
  s.deltaA_vertices = {dA * MatrixXd::Identity(2, 2), -dA * MatrixXd::Identity(2, 2)};
  s.deltaB_vertices = {dB * MatrixXd::Ones(2, 1), -dB * MatrixXd::Ones(2, 1)};
  s.X = Polytope::cube(2, x);
  s.U = Polytope::cube(1, u);
  s.W = Polytope::cube(2, w);
  return s;
}

TEST(NetAdditiveBound, PureAdditive) {
  const UncertainSystem s = make_2d(0.0, 0.0, 8, 4, 0.1);
  EXPECT_NEAR(net_additive_bound(s).w_tilde_max, 0.1, 1e-15);
}

TEST(NetAdditiveBound, ComposesTerms) {
  const NetAdditiveBound b = net_additive_bound(make_2d(0.1, 0.1, 8, 4, 0.1));
  EXPECT_NEAR(b.dA_norm, 0.1, 1e-15);
  EXPECT_NEAR(b.dB_norm, 0.1, 1e-15);
  EXPECT_NEAR(b.x_max, 8.0, 1e-12);
  EXPECT_NEAR(b.u_max, 4.0, 1e-12);
  EXPECT_NEAR(b.w_tilde_max, 0.1 * 8 + 0.1 * 4 + 0.1, 1e-12);
  EXPECT_EQ(b.w_tilde_max, b.dA_norm * b.x_max + b.dB_norm * b.u_max + b.w_max);
}

TEST(NetAdditiveBound, ScalingWOnlyMovesDisturbanceTerm) {
  const NetAdditiveBound a = net_additive_bound(make_2d(0.1, 0.1, 8, 4, 0.1));
  const NetAdditiveBound b = net_additive_bound(make_2d(0.1, 0.1, 8, 4, 0.2));
  EXPECT_NEAR(b.w_max, 2 * a.w_max, 1e-15);
  EXPECT_NEAR(b.w_tilde_max - b.w_max, a.w_tilde_max - a.w_max, 1e-15);
}

TEST(NetAdditiveBound, NonBoxSetsUseLp) {
  UncertainSystem s = make_2d(0.0, 0.0, 8, 4, 0.1);
  MatrixXd H(4, 2);
  H << 1, 1, 1, -1, -1, 1, -1, -1;
  s.W = Polytope(H, vec({0.3, 0.3, 0.3, 0.3}));
  EXPECT_NEAR(net_additive_bound(s).w_max, 0.3, 1e-9);
}

TEST(NetAdditiveBound, MonotoneUnderEnlargement) {
  const double base = net_additive_bound(make_2d(0.1, 0.05, 3, 2, 0.1)).w_tilde_max;
  for (double lambda : {1.0, 1.5, 3.0}) {
    EXPECT_GE(net_additive_bound(make_2d(0.1, 0.05, 3 * lambda, 2, 0.1)).w_tilde_max, base);
    EXPECT_GE(net_additive_bound(make_2d(0.1, 0.05, 3, 2 * lambda, 0.1)).w_tilde_max, base);
    EXPECT_GE(net_additive_bound(make_2d(0.1, 0.05, 3, 2, 0.1 * lambda)).w_tilde_max, base);
  }
}

TEST(NetAdditiveBound, UnboundedSetIsReported) {
  UncertainSystem s = make_2d(0.1, 0.1, 8, 4, 0.1);
  MatrixXd H(3, 2);
  H << 1, 0, 0, 1, 0, -1;
  s.X = Polytope(H, vec({1, 1, 1}));
  try {
    net_additive_bound(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnboundedConstraintSet);
  }
}

TEST(NetAdditiveBound, OverApproximatesRandomTriples) {
  UncertainSystem s;
  s.A_bar = MatrixXd::Identity(2, 2);
  s.B_bar = MatrixXd::Ones(2, 1);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (int i = 0; i < 3; ++i) {
    s.deltaA_vertices.push_back(MatrixXd::NullaryExpr(2, 2, [&] { return u(rng); }));
  }
  for (int i = 0; i < 2; ++i) {
    s.deltaB_vertices.push_back(MatrixXd::NullaryExpr(2, 1, [&] { return u(rng); }));
  }
  s.X = Polytope::box(vec({-3, -2}), vec({4, 2}));
  s.U = Polytope::cube(1, 1.5);
  s.W = Polytope::cube(2, 0.05);
  const NetAdditiveBound b = net_additive_bound(s);
  std::mt19937 pick(37);
  for (int trial = 0; trial < 10000; ++trial) {
    const UncertaintyRealization r =
        sample_realization(s, 1, static_cast<std::uint64_t>(trial),
                           trial % 5 == 0 ? SamplingMode::kAdversarial : SamplingMode::kUniform);
    const auto xs = testing::sample_inside(s.X, 1, pick);
    const auto us = testing::sample_inside(s.U, 1, pick);
    const VectorXd wt = r.deltaA_true * xs[0] + r.deltaB_true * us[0] + r.w_sequence[0];
    ASSERT_LE(wt.lpNorm<Eigen::Infinity>(), b.w_tilde_max + 1e-12);
  }
}

TEST(NetAdditiveBound, VertexMaxBoundsHullNorms) {
  std::mt19937 rng(41);
  std::normal_distribution<double> normal;
  std::vector<MatrixXd> vertices;
  double vmax = 0.0;
  for (int i = 0; i < 4; ++i) {
    vertices.push_back(MatrixXd::NullaryExpr(3, 3, [&] { return normal(rng); }));
    vmax = std::max(vmax, vertices.back().cwiseAbs().rowwise().sum().maxCoeff());
  }
  std::exponential_distribution<double> expo;
  for (int trial = 0; trial < 500; ++trial) {
    VectorXd w = VectorXd::NullaryExpr(4, [&] { return expo(rng); });
    w /= w.sum();
    MatrixXd M = MatrixXd::Zero(3, 3);
    for (int i = 0; i < 4; ++i) M += w[i] * vertices[static_cast<size_t>(i)];
    EXPECT_LE(M.cwiseAbs().rowwise().sum().maxCoeff(), vmax + 1e-12);
  }
}

TEST(SampleRealization, Deterministic) {
  const UncertainSystem s = make_2d(0.1, 0.1, 8, 4, 0.1);
  const UncertaintyRealization a = sample_realization(s, 20, 5);
  const UncertaintyRealization b = sample_realization(s, 20, 5);
  EXPECT_EQ(a.deltaA_true, b.deltaA_true);
  EXPECT_EQ(a.deltaB_true, b.deltaB_true);
  for (size_t t = 0; t < a.w_sequence.size(); ++t) EXPECT_EQ(a.w_sequence[t], b.w_sequence[t]);
}

TEST(SampleRealization, SamplesAreAdmissible) {
  const UncertainSystem s = make_2d(0.1, 0.1, 8, 4, 0.1);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = sample_realization(s, 30, seed);
    EXPECT_TRUE(realization_is_admissible(s, r));
    EXPECT_EQ(r.w_sequence.size(), 30u);
  }
}

TEST(SampleRealization, AdversarialPicksAVertex) {
  const UncertainSystem s = make_2d(0.1, 0.1, 8, 4, 0.1);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = sample_realization(s, 5, seed, SamplingMode::kAdversarial);
    EXPECT_TRUE(r.deltaA_true == s.deltaA_vertices[0] || r.deltaA_true == s.deltaA_vertices[1]);
    EXPECT_TRUE(realization_is_admissible(s, r));
    for (const auto& w : r.w_sequence) EXPECT_DOUBLE_EQ(w.cwiseAbs().minCoeff(), 0.1);
  }
}

TEST(SampleRealization, RejectsNonPositiveHorizon) {
  EXPECT_THROW(sample_realization(make_2d(0, 0, 1, 1, 0.1), 0, 1), Error);
}

TEST(Validate, RejectsOriginOutsideInterior) {
  UncertainSystem s = make_2d(0.1, 0.1, 8, 4, 0.1);
  s.W = Polytope::box(vec({0, -0.1}), vec({0.1, 0.1}));
  EXPECT_THROW(s.validate(), Error);
}

TEST(Validate, ClosedLoopVerticesAreJMajor) {
  const UncertainSystem s = make_2d(0.1, 0.2, 8, 4, 0.1);
  const MatrixXd K = MatrixXd::Constant(1, 2, -0.3);
  const auto v = s.closed_loop_vertices(K);
  ASSERT_EQ(v.size(), 4u);
  EXPECT_TRUE(v[1].isApprox(s.A_bar + s.deltaA_vertices[0] + (s.B_bar + s.deltaB_vertices[1]) * K));
}

const char* kScalar = R"({
  "A_bar": [[1.0]], "B_bar": [[1.0]],
  "deltaA_vertices": [[[0.0]]], "deltaB_vertices": [[[0.0]]],
  "W": {"box": {"lo": [-0.1], "hi": [0.1]}},
  "X": {"H": [[1.0], [-1.0]], "h": [1.0, 1.0]},
  "U": {"box": {"lo": [-1.0], "hi": [1.0]}},
  "cost": {"P": [[1.0]], "R": [[1.0]]},
  "K": [[-0.5]], "N": 3
})";

std::string with(const std::string& key, const std::string& value) {
  nlohmann::json j = nlohmann::json::parse(kScalar);
  j[key] = nlohmann::json::parse(value);
  return j.dump();
}

void expect_path(const std::string& text, const std::string& path) {
  try {
    parse_problem(text);
    FAIL() << "expected failure at " << path;
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()).rfind(path + ":", 0), 0u) << e.what();
  }
}

TEST(ParseProblem, LoadsScalarFixture) {
  const Problem p = parse_problem(kScalar);
  EXPECT_EQ(p.N, 3);
  EXPECT_EQ(p.sys.state_dim(), 1);
  EXPECT_DOUBLE_EQ(p.sys.X.support(vec({1})), 1.0);
  EXPECT_TRUE(p.sys.W.box_bounds().has_value());
}

TEST(ParseProblem, ReportsFieldPaths) {
  expect_path("{", "<root>");
  expect_path(with("A_bar", "[[1, 0]]"), "A_bar");
  expect_path(with("B_bar", "[[1], [2]]"), "B_bar");
  expect_path(with("W", R"({"box": {"lo": [-0.1, 0], "hi": [0.1]}})"), "W.box.lo");
  expect_path(with("X", R"({"box": {"lo": [0.0], "hi": [1.0]}})"), "X");
  expect_path(with("U", R"({"H": [[1.0]], "h": [1.0]})"), "U");
  expect_path(with("cost", R"({"P": [[-1.0]], "R": [[1.0]]})"), "cost.P");
  expect_path(with("K", "[[1, 2]]"), "K");
  expect_path(with("N", "0"), "N");
  expect_path(with("deltaA_vertices", "[[[1, 2]]]"), "deltaA_vertices[0]");
  expect_path(with("deltaB_vertices", "[]"), "deltaB_vertices");
  expect_path(with("typo", "1"), "typo");
  expect_path(with("A_bar", R"([["x"]])"), "A_bar[0][0]");
}

TEST(ParseProblem, ShippedProblemsLoad) {
  for (const char* file : {"default_2d.json", "scalar.json"}) {
    const Problem p = load_problem(std::filesystem::path(RMPC_PROBLEM_DIR) / file);
    EXPECT_GE(p.N, 1) << file;
  }
  const Problem p = load_problem(std::filesystem::path(RMPC_PROBLEM_DIR) / "default_2d.json");
  EXPECT_NEAR(net_additive_bound(p.sys).w_tilde_max, 0.06 * 8 + 0.06 * 4 + 0.1, 1e-12);
  ASSERT_TRUE(p.reference_gain.has_value());
}

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 14695981039346656037ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

}  // namespace
}  // namespace rmpc
