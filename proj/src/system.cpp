#include "rmpc/system.hpp"

#include <cmath>
#include <random>
#include <string>

#include "rmpc/error.hpp"

namespace rmpc {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::string shape(const MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void check_compact_interior(const Polytope& P, Index dim, const char* name) {
  if (P.dim() != dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(name) + " has dimension " + std::to_string(P.dim()) +
                    ", expected " + std::to_string(dim));
  }
  for (Index i = 0; i < dim; ++i) {
    for (double s : {1.0, -1.0}) {
      double value = 0.0;
      try {
        value = P.support(s * VectorXd::Unit(dim, i));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kUnbounded) {
          throw Error(ErrorCode::kUnboundedConstraintSet,
                      std::string(name) + " is unbounded along coordinate " +
                          std::to_string(i));
        }
        if (e.code() == ErrorCode::kEmptyPolytope) {
          throw Error(ErrorCode::kInvalidProblem, std::string(name) + " is empty");
        }
        throw;
      }
      if (!(value > 0.0)) {
        throw Error(ErrorCode::kInvalidProblem,
                    std::string(name) + " does not contain the origin in its interior");
      }
    }
  }
  if (!(P.margin(VectorXd::Zero(dim)) > 0.0)) {
    throw Error(ErrorCode::kInvalidProblem,
                std::string(name) + " does not contain the origin in its interior");
  }
}

VectorXd simplex_weights(Index n, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  VectorXd w(n);
  for (Index i = 0; i < n; ++i) w[i] = expo(rng);
  return w / w.sum();
}

VectorXd one_hot(Index n, Index i) { return VectorXd::Unit(n, i); }

MatrixXd combine(const std::vector<MatrixXd>& vertices, const VectorXd& weights) {
  MatrixXd out = MatrixXd::Zero(vertices.front().rows(), vertices.front().cols());
  for (size_t i = 0; i < vertices.size(); ++i) {
    out += weights[static_cast<Index>(i)] * vertices[i];
  }
  return out;
}

VectorXd box_corner(const VectorXd& lo, const VectorXd& hi, std::uint64_t bits) {
  VectorXd c(lo.size());
  for (Index i = 0; i < lo.size(); ++i) c[i] = ((bits >> i) & 1u) ? hi[i] : lo[i];
  return c;
}

}  // namespace

void UncertainSystem::validate() const {
  const Index d = A_bar.rows();
  if (d < 1 || A_bar.cols() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "A_bar must be square, got " + shape(A_bar));
  }
  if (B_bar.rows() != d || B_bar.cols() < 1) {
    throw Error(ErrorCode::kDimensionMismatch,
                "B_bar must have " + std::to_string(d) + " rows, got " + shape(B_bar));
  }
  const Index m = B_bar.cols();
  if (deltaA_vertices.empty() || deltaB_vertices.empty()) {
    throw Error(ErrorCode::kInvalidProblem, "at least one vertex per uncertainty hull");
  }
  for (size_t j = 0; j < deltaA_vertices.size(); ++j) {
    if (deltaA_vertices[j].rows() != d || deltaA_vertices[j].cols() != d) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "deltaA_vertices[" + std::to_string(j) + "] has shape " +
                      shape(deltaA_vertices[j]));
    }
  }
  for (size_t k = 0; k < deltaB_vertices.size(); ++k) {
    if (deltaB_vertices[k].rows() != d || deltaB_vertices[k].cols() != m) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "deltaB_vertices[" + std::to_string(k) + "] has shape " +
                      shape(deltaB_vertices[k]));
    }
  }
  check_compact_interior(X, d, "X");
  check_compact_interior(U, m, "U");
  check_compact_interior(W, d, "W");
}

std::vector<MatrixXd> UncertainSystem::closed_loop_vertices(const MatrixXd& K) const {
  if (K.rows() != input_dim() || K.cols() != state_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "K has shape " + shape(K));
  }
  std::vector<MatrixXd> out;
  out.reserve(deltaA_vertices.size() * deltaB_vertices.size());
  for (const MatrixXd& dA : deltaA_vertices) {
    for (const MatrixXd& dB : deltaB_vertices) {
      out.push_back(A_bar + dA + (B_bar + dB) * K);
    }
  }
  return out;
}

double max_inf_norm(const Polytope& P) {
  double best = 0.0;
  for (Index i = 0; i < P.dim(); ++i) {
    for (double s : {1.0, -1.0}) {
      try {
        best = std::max(best, P.support(s * VectorXd::Unit(P.dim(), i)));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kUnbounded) {
          throw Error(ErrorCode::kUnboundedConstraintSet,
                      "set is unbounded along coordinate " + std::to_string(i));
        }
        throw;
      }
    }
  }
  return best;
}

NetAdditiveBound net_additive_bound(const UncertainSystem& sys) {
  NetAdditiveBound b;
  for (const MatrixXd& dA : sys.deltaA_vertices) {
    b.dA_norm = std::max(b.dA_norm, dA.cwiseAbs().rowwise().sum().maxCoeff());
  }
  for (const MatrixXd& dB : sys.deltaB_vertices) {
    b.dB_norm = std::max(b.dB_norm, dB.cwiseAbs().rowwise().sum().maxCoeff());
  }
  b.x_max = max_inf_norm(sys.X);
  b.u_max = max_inf_norm(sys.U);
  b.w_max = max_inf_norm(sys.W);
  b.w_tilde_max = b.dA_norm * b.x_max + b.dB_norm * b.u_max + b.w_max;
  return b;
}

UncertaintyRealization sample_realization(const UncertainSystem& sys, int horizon,
                                          std::uint64_t seed, SamplingMode mode) {
  if (horizon < 1) {
    throw Error(ErrorCode::kInvalidProblem, "sample_realization: horizon must be >= 1");
  }
  std::mt19937_64 rng(seed);
  const auto na = static_cast<Index>(sys.deltaA_vertices.size());
  const auto nb = static_cast<Index>(sys.deltaB_vertices.size());
  UncertaintyRealization r;
  if (mode == SamplingMode::kAdversarial) {
    std::uniform_int_distribution<Index> pick_a(0, na - 1), pick_b(0, nb - 1);
    r.weights_A = one_hot(na, pick_a(rng));
    r.weights_B = one_hot(nb, pick_b(rng));
  } else {
    r.weights_A = simplex_weights(na, rng);
    r.weights_B = simplex_weights(nb, rng);
  }
  r.deltaA_true = combine(sys.deltaA_vertices, r.weights_A);
  r.deltaB_true = combine(sys.deltaB_vertices, r.weights_B);

  const auto [lo, hi] = sys.W.bounding_box();
  const Index d = sys.state_dim();
  const std::uint64_t corners = d < 63 ? (std::uint64_t{1} << d) : ~std::uint64_t{0};
  std::uniform_int_distribution<std::uint64_t> pick_corner(0, corners - 1);
  r.w_sequence.reserve(static_cast<size_t>(horizon));
  for (int t = 0; t < horizon; ++t) {
    VectorXd w = VectorXd::Zero(d);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      VectorXd candidate;
      if (mode == SamplingMode::kAdversarial) {
        candidate = box_corner(lo, hi, pick_corner(rng));
      } else if (d <= 6) {
        const VectorXd lambda = simplex_weights(static_cast<Index>(corners), rng);
        candidate = VectorXd::Zero(d);
        for (std::uint64_t c = 0; c < corners; ++c) {
          candidate += lambda[static_cast<Index>(c)] * box_corner(lo, hi, c);
        }
      } else {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        candidate = lo + (hi - lo).cwiseProduct(
                             VectorXd::NullaryExpr(d, [&] { return unit(rng); }));
      }
      if (sys.W.contains(candidate, 0.0)) {
        w = candidate;
        break;
      }
    }
    r.w_sequence.push_back(w);
  }
  return r;
}

UncertaintyRealization zero_realization(const UncertainSystem& sys, int horizon) {
  UncertaintyRealization r;
  const auto na = static_cast<Index>(sys.deltaA_vertices.size());
  const auto nb = static_cast<Index>(sys.deltaB_vertices.size());
  r.weights_A = VectorXd::Constant(na, 1.0 / static_cast<double>(na));
  r.weights_B = VectorXd::Constant(nb, 1.0 / static_cast<double>(nb));
  r.deltaA_true = MatrixXd::Zero(sys.state_dim(), sys.state_dim());
  r.deltaB_true = MatrixXd::Zero(sys.state_dim(), sys.input_dim());
  r.w_sequence.assign(static_cast<size_t>(std::max(horizon, 0)),
                      VectorXd::Zero(sys.state_dim()));
  return r;
}

bool realization_is_admissible(const UncertainSystem& sys,
                               const UncertaintyRealization& r, double tol) {
  auto simplex_ok = [tol](const VectorXd& w, size_t n) {
    return w.size() == static_cast<Index>(n) && w.minCoeff() >= -tol &&
           std::abs(w.sum() - 1.0) <= tol;
  };
  if (!simplex_ok(r.weights_A, sys.deltaA_vertices.size()) ||
      !simplex_ok(r.weights_B, sys.deltaB_vertices.size())) {
    return false;
  }
  if ((combine(sys.deltaA_vertices, r.weights_A) - r.deltaA_true)
              .lpNorm<Eigen::Infinity>() > tol ||
      (combine(sys.deltaB_vertices, r.weights_B) - r.deltaB_true)
              .lpNorm<Eigen::Infinity>() > tol) {
    return false;
  }
  for (const VectorXd& w : r.w_sequence) {
    if (w.size() != sys.state_dim() || !sys.W.contains(w, tol)) return false;
  }
  return true;
}

}  // namespace rmpc
