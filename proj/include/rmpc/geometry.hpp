#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace rmpc {

/// Absolute tolerance on (row-normalized) facet offsets used for inclusion
/// and fixed-point tests.
inline constexpr double kFacetTol = 1e-7;

/// Offset slack below which a row is treated as implied by the others.
inline constexpr double kRedundancyTol = 1e-9;

/// Closed convex set {x : Hx ≤ h} in H-representation. Immutable.
class Polytope {
 public:
  /// Placeholder with dim() == 0; only useful as a target for assignment.
  Polytope() = default;
  Polytope(Eigen::MatrixXd H, Eigen::VectorXd h);

  /// Axis-aligned box lo ≤ x ≤ hi as rows [I; −I].
  static Polytope box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

  /// Symmetric box ‖x‖∞ ≤ radius.
  static Polytope cube(Eigen::Index dim, double radius);

  const Eigen::MatrixXd& H() const { return H_; }
  const Eigen::VectorXd& h() const { return h_; }
  Eigen::Index dim() const { return H_.cols(); }
  Eigen::Index num_facets() const { return H_.rows(); }

  /// min_i (h_i − H_i x); negative when x is outside.
  double margin(const Eigen::VectorXd& x) const;
  bool contains(const Eigen::VectorXd& x, double tol = kFacetTol) const;

  /// max over x in P of c·x. Throws Error(kEmptyPolytope) or Error(kUnbounded).
  double support(const Eigen::VectorXd& c) const;

  /// One feasibility LP.
  bool is_empty() const;

  /// Present when every row is a positive multiple of ±e_i; supports are then
  /// evaluated in closed form.
  const std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& box_bounds()
      const {
    return box_;
  }

  Polytope intersect(const Polytope& other) const;

  /// {x : M x ∈ P}.
  Polytope preimage(const Eigen::MatrixXd& M) const;

  /// Rows scaled to unit 2-norm (zero rows are kept as-is).
  Polytope normalized() const;

  /// [lo, hi] from coordinate supports. Throws like support().
  std::pair<Eigen::VectorXd, Eigen::VectorXd> bounding_box() const;

 private:
  Eigen::MatrixXd H_;
  Eigen::VectorXd h_;
  std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> box_;
};

/// True iff P ⊆ Q up to kFacetTol on Q's normalized facets. An empty P is a
/// subset of everything. Throws Error(kDimensionMismatch).
bool is_subset(const Polytope& P, const Polytope& Q, double tol = kFacetTol);

/// Drops implied rows one at a time; survivors keep their relative order.
/// Throws Error(kEmptyPolytope) when P is empty.
Polytope remove_redundant(const Polytope& P);

/// One-step robust predecessor
///   {x ∈ X : A x + w ∈ S  for every A in closed_loop and every w ∈ W}
/// with redundant rows removed. Returns std::nullopt when the set is empty.
std::optional<Polytope> pre_set(const Polytope& S,
                                std::span<const Eigen::MatrixXd> closed_loop,
                                const Polytope& W, const Polytope& X);

/// Maximal robust positive invariant subset of `constraints` for
/// x⁺ = A x + w, A ∈ conv(closed_loop), w ∈ W, by the outer recursion
/// Ω ← pre(Ω) ∩ Ω. Returns std::nullopt when the invariant set is empty;
/// throws Error(kNoConvergence) after max_iter sweeps.
std::optional<Polytope> max_robust_invariant(
    const Polytope& constraints, std::span<const Eigen::MatrixXd> closed_loop,
    const Polytope& W, int max_iter = 500);

struct PointCloudHull2D {
  std::vector<Eigen::Vector2d> points;
  std::vector<Eigen::Vector2d> hull;  // counter-clockwise
  double area = 0.0;
};

/// Monotone-chain hull. Collinear boundary points are dropped; degenerate
/// input gives a hull with fewer than three vertices and zero area.
PointCloudHull2D hull_2d(std::vector<Eigen::Vector2d> points);

/// Shoelace area of a simple polygon (positive for counter-clockwise order).
double polygon_area(std::span<const Eigen::Vector2d> polygon);

/// Counter-clockwise vertices of a bounded 2-D polytope (empty if P is empty).
std::vector<Eigen::Vector2d> vertices_2d(const Polytope& P);

}  // namespace rmpc
