#include <cmath>
#include <string>

#include "rmpc/error.hpp"
#include "rmpc/geometry.hpp"
#include "rmpc/qp.hpp"

namespace rmpc {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::optional<std::pair<VectorXd, VectorXd>> detect_box(const MatrixXd& H,
                                                        const VectorXd& h) {
  const Index d = H.cols();
  VectorXd lo = VectorXd::Constant(d, -std::numeric_limits<double>::infinity());
  VectorXd hi = VectorXd::Constant(d, std::numeric_limits<double>::infinity());
  for (Index i = 0; i < H.rows(); ++i) {
    Index axis = -1;
    for (Index j = 0; j < d; ++j) {
      if (H(i, j) == 0.0) continue;
      if (axis >= 0) return std::nullopt;
      axis = j;
    }
    if (axis < 0) return std::nullopt;
    const double a = H(i, axis);
    if (a > 0.0) {
      hi[axis] = std::min(hi[axis], h[i] / a);
    } else {
      lo[axis] = std::max(lo[axis], h[i] / a);
    }
  }
  if (!lo.allFinite() || !hi.allFinite()) return std::nullopt;
  return std::make_pair(lo, hi);
}

}  // namespace

Polytope::Polytope(MatrixXd H, VectorXd h) : H_(std::move(H)), h_(std::move(h)) {
  if (H_.rows() != h_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "polytope: H has " + std::to_string(H_.rows()) +
                    " rows but h has " + std::to_string(h_.size()) +
                    " entries");
  }
  if (H_.cols() < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "polytope: dimension must be >= 1");
  }
  if (!H_.allFinite() || !h_.allFinite()) {
    throw Error(ErrorCode::kInvalidProblem, "polytope: non-finite entries");
  }
  box_ = detect_box(H_, h_);
}

Polytope Polytope::box(const VectorXd& lo, const VectorXd& hi) {
  if (lo.size() != hi.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "box: lo/hi size mismatch");
  }
  const Index d = lo.size();
  MatrixXd H(2 * d, d);
  H << MatrixXd::Identity(d, d), -MatrixXd::Identity(d, d);
  VectorXd h(2 * d);
  h << hi, -lo;
  return Polytope(std::move(H), std::move(h));
}

Polytope Polytope::cube(Index dim, double radius) {
  return box(VectorXd::Constant(dim, -radius), VectorXd::Constant(dim, radius));
}

double Polytope::margin(const VectorXd& x) const {
  if (num_facets() == 0) return std::numeric_limits<double>::infinity();
  return (h_ - H_ * x).minCoeff();
}

bool Polytope::contains(const VectorXd& x, double tol) const {
  return margin(x) >= -tol;
}

double Polytope::support(const VectorXd& c) const {
  if (c.size() != dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "support: direction size");
  }
  if (box_) {
    const auto& [lo, hi] = *box_;
    if ((lo.array() > hi.array()).any()) {
      throw Error(ErrorCode::kEmptyPolytope, "support: empty box");
    }
    return (c.array() > 0.0).select(c.cwiseProduct(hi), c.cwiseProduct(lo)).sum();
  }
  const SolveOutcome out = solve_lp(-c, H_, h_);
  switch (out.status) {
    case SolveStatus::kOptimal:
      return -out.objective;
    case SolveStatus::kInfeasible:
      throw Error(ErrorCode::kEmptyPolytope, "support: polytope is empty");
    case SolveStatus::kUnbounded:
      throw Error(ErrorCode::kUnbounded, "support: unbounded in direction");
    case SolveStatus::kNumericalFailure:
      break;
  }
  throw Error(ErrorCode::kNumericalFailure, "support: LP failed");
}

bool Polytope::is_empty() const {
  if (box_) return ((box_->first.array() > box_->second.array()).any());
  const SolveOutcome out = solve_lp(VectorXd::Zero(dim()), H_, h_);
  if (out.status == SolveStatus::kNumericalFailure) {
    throw Error(ErrorCode::kNumericalFailure, "is_empty: LP failed");
  }
  return out.status == SolveStatus::kInfeasible;
}

Polytope Polytope::intersect(const Polytope& other) const {
  if (other.dim() != dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "intersect: dimension mismatch");
  }
  MatrixXd H(num_facets() + other.num_facets(), dim());
  H << H_, other.H_;
  VectorXd h(H.rows());
  h << h_, other.h_;
  return Polytope(std::move(H), std::move(h));
}

Polytope Polytope::preimage(const MatrixXd& M) const {
  if (M.rows() != dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "preimage: dimension mismatch");
  }
  return Polytope(H_ * M, h_);
}

Polytope Polytope::normalized() const {
  MatrixXd H = H_;
  VectorXd h = h_;
  for (Index i = 0; i < H.rows(); ++i) {
    const double n = H.row(i).norm();
    if (n > 0.0) {
      H.row(i) /= n;
      h[i] /= n;
    }
  }
  return Polytope(std::move(H), std::move(h));
}

std::pair<VectorXd, VectorXd> Polytope::bounding_box() const {
  if (box_) return *box_;
  VectorXd lo(dim()), hi(dim());
  for (Index i = 0; i < dim(); ++i) {
    const VectorXd e = VectorXd::Unit(dim(), i);
    hi[i] = support(e);
    lo[i] = -support(-e);
  }
  return {lo, hi};
}

}  // namespace rmpc
