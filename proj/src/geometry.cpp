#include <algorithm>
#include <cmath>
#include <string>

#include "rmpc/error.hpp"
#include "rmpc/geometry.hpp"
#include "rmpc/qp.hpp"

namespace rmpc {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

bool is_subset(const Polytope& P, const Polytope& Q, double tol) {
  if (P.dim() != Q.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "is_subset: dimensions " + std::to_string(P.dim()) + " and " +
                    std::to_string(Q.dim()));
  }
  if (P.is_empty()) return true;
  const Polytope Qn = Q.normalized();
  for (Index i = 0; i < Qn.num_facets(); ++i) {
    const VectorXd row = Qn.H().row(i).transpose();
    if (row.isZero()) {
      if (Qn.h()[i] < -tol) return false;
      continue;
    }
    try {
      if (P.support(row) > Qn.h()[i] + tol) return false;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kUnbounded) return false;
      throw;
    }
  }
  return true;
}

Polytope remove_redundant(const Polytope& P) {
  if (P.is_empty()) {
    throw Error(ErrorCode::kEmptyPolytope, "remove_redundant: empty polytope");
  }
  const Polytope Pn = P.normalized();
  const Index m = P.num_facets();
  const Index d = P.dim();
  std::vector<bool> keep(static_cast<size_t>(m), true);

  // Vacuous zero rows and parallel duplicates need no LP.
  for (Index i = 0; i < m; ++i) {
    if (Pn.H().row(i).isZero()) {
      keep[static_cast<size_t>(i)] = false;
      continue;
    }
    for (Index j = 0; j < m; ++j) {
      if (j == i || !keep[static_cast<size_t>(j)]) continue;
      if ((Pn.H().row(i) - Pn.H().row(j)).lpNorm<Eigen::Infinity>() > 1e-12) {
        continue;
      }
      if (Pn.h()[j] <= Pn.h()[i] + kRedundancyTol) {
        keep[static_cast<size_t>(i)] = false;
        break;
      }
    }
  }

  for (Index i = 0; i < m; ++i) {
    if (!keep[static_cast<size_t>(i)]) continue;
    std::vector<Index> others;
    for (Index j = 0; j < m; ++j) {
      if (j != i && keep[static_cast<size_t>(j)]) others.push_back(j);
    }
    MatrixXd G(static_cast<Index>(others.size()) + 1, d);
    VectorXd g(G.rows());
    for (size_t k = 0; k < others.size(); ++k) {
      G.row(static_cast<Index>(k)) = Pn.H().row(others[k]);
      g[static_cast<Index>(k)] = Pn.h()[others[k]];
    }
    G.row(G.rows() - 1) = Pn.H().row(i);
    g[G.rows() - 1] = Pn.h()[i] + 1.0;
    const SolveOutcome out = solve_lp(-Pn.H().row(i).transpose(), G, g);
    if (out.status != SolveStatus::kOptimal) {
      throw Error(ErrorCode::kNumericalFailure,
                  "remove_redundant: redundancy LP failed for row " +
                      std::to_string(i));
    }
    if (-out.objective <= Pn.h()[i] + kRedundancyTol) {
      keep[static_cast<size_t>(i)] = false;
    }
  }

  std::vector<Index> rows;
  for (Index i = 0; i < m; ++i) {
    if (keep[static_cast<size_t>(i)]) rows.push_back(i);
  }
  MatrixXd H(static_cast<Index>(rows.size()), d);
  VectorXd h(H.rows());
  for (size_t k = 0; k < rows.size(); ++k) {
    H.row(static_cast<Index>(k)) = P.H().row(rows[k]);
    h[static_cast<Index>(k)] = P.h()[rows[k]];
  }
  return Polytope(std::move(H), std::move(h));
}

std::optional<Polytope> pre_set(const Polytope& S,
                                std::span<const MatrixXd> closed_loop,
                                const Polytope& W, const Polytope& X) {
  const Index d = S.dim();
  if (W.dim() != d || X.dim() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "pre_set: set dimensions differ");
  }
  for (const MatrixXd& A : closed_loop) {
    if (A.rows() != d || A.cols() != d) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "pre_set: closed-loop matrix must be square of size " +
                      std::to_string(d));
    }
  }
  VectorXd tightened(S.num_facets());
  for (Index i = 0; i < S.num_facets(); ++i) {
    tightened[i] = S.h()[i] - W.support(S.H().row(i).transpose());
  }
  const Index per = S.num_facets();
  MatrixXd H(X.num_facets() + per * static_cast<Index>(closed_loop.size()), d);
  VectorXd h(H.rows());
  H.topRows(X.num_facets()) = X.H();
  h.head(X.num_facets()) = X.h();
  Index row = X.num_facets();
  for (const MatrixXd& A : closed_loop) {
    H.middleRows(row, per) = S.H() * A;
    h.segment(row, per) = tightened;
    row += per;
  }
  const Polytope candidate = Polytope(std::move(H), std::move(h)).normalized();
  if (candidate.is_empty()) return std::nullopt;
  return remove_redundant(candidate);
}

std::optional<Polytope> max_robust_invariant(
    const Polytope& constraints, std::span<const MatrixXd> closed_loop,
    const Polytope& W, int max_iter) {
  if (constraints.is_empty()) return std::nullopt;
  Polytope omega = remove_redundant(constraints.normalized());
  for (int iter = 0; iter < max_iter; ++iter) {
    std::optional<Polytope> next = pre_set(omega, closed_loop, W, omega);
    if (!next) return std::nullopt;
    if (is_subset(omega, *next)) return next;
    omega = std::move(*next);
  }
  throw Error(ErrorCode::kNoConvergence,
              "max_robust_invariant: no fixed point after " +
                  std::to_string(max_iter) + " iterations");
}

double polygon_area(std::span<const Eigen::Vector2d> polygon) {
  double twice = 0.0;
  const size_t n = polygon.size();
  for (size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& a = polygon[i];
    const Eigen::Vector2d& b = polygon[(i + 1) % n];
    twice += a.x() * b.y() - a.y() * b.x();
  }
  return 0.5 * twice;
}

PointCloudHull2D hull_2d(std::vector<Eigen::Vector2d> points) {
  PointCloudHull2D out;
  out.points = points;
  std::sort(points.begin(), points.end(),
            [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
              return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
            });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) {
    out.hull = points;
    return out;
  }
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                  const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * points.size());
  size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  out.hull = std::move(hull);
  out.area = out.hull.size() >= 3 ? polygon_area(out.hull) : 0.0;
  return out;
}

std::vector<Eigen::Vector2d> vertices_2d(const Polytope& P) {
  if (P.dim() != 2) {
    throw Error(ErrorCode::kDimensionMismatch, "vertices_2d: polytope is not 2-D");
  }
  const Polytope Pn = P.normalized();
  std::vector<Eigen::Vector2d> candidates;
  for (Index i = 0; i < Pn.num_facets(); ++i) {
    for (Index j = i + 1; j < Pn.num_facets(); ++j) {
      Eigen::Matrix2d M;
      M << Pn.H().row(i), Pn.H().row(j);
      if (std::abs(M.determinant()) < 1e-12) continue;
      const Eigen::Vector2d v =
          M.partialPivLu().solve(Eigen::Vector2d(Pn.h()[i], Pn.h()[j]));
      if (Pn.contains(v, 1e-9)) candidates.push_back(v);
    }
  }
  return hull_2d(std::move(candidates)).hull;
}

}  // namespace rmpc
