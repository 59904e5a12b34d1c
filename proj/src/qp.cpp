#include "rmpc/qp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/SparseCholesky>

#include "rmpc/error.hpp"

namespace rmpc {

using Eigen::Index;
using Eigen::VectorXd;

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kNumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

QuadraticProgram QuadraticProgram::with_variables(Index n) {
  QuadraticProgram p;
  p.Q.resize(n, n);
  p.q = VectorXd::Zero(n);
  p.G.resize(0, n);
  p.h.resize(0);
  p.A.resize(0, n);
  p.b.resize(0);
  return p;
}

double QuadraticProgram::objective(const VectorXd& x) const {
  return 0.5 * x.dot(Q * x) + q.dot(x);
}

void QuadraticProgram::validate() const {
  const Index n = q.size();
  if (Q.rows() != n || Q.cols() != n) {
    throw Error(ErrorCode::kInvalidProblem, "QP: Q must be n x n");
  }
  if (G.cols() != n || G.rows() != h.size()) {
    throw Error(ErrorCode::kInvalidProblem, "QP: G/h dimensions inconsistent");
  }
  if (A.cols() != n || A.rows() != b.size()) {
    throw Error(ErrorCode::kInvalidProblem, "QP: A/b dimensions inconsistent");
  }
  if (Q.nonZeros() == 0) return;
  const SparseMatrix asym = SparseMatrix(Q.transpose()) - Q;
  double scale = 1.0;
  for (Index k = 0; k < Q.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(Q, k); it; ++it) {
      scale = std::max(scale, std::abs(it.value()));
    }
  }
  for (Index k = 0; k < asym.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(asym, k); it; ++it) {
      if (std::abs(it.value()) > 1e-12 * scale) {
        throw Error(ErrorCode::kInvalidProblem, "QP: Q is not symmetric");
      }
    }
  }
  SparseMatrix shifted = Q;
  for (Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += 1e-10 * scale;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(shifted);
  if (ldlt.info() != Eigen::Success ||
      ldlt.vectorD().minCoeff() < -1e-9 * scale) {
    throw Error(ErrorCode::kInvalidProblem,
                "QP: Q is not positive semidefinite");
  }
}

bool CertificateCheck::valid(double tol) const {
  return stationarity <= tol && min_multiplier >= -tol && value < 0.0;
}

CertificateCheck check_certificate(const QuadraticProgram& prog,
                                   const SolveOutcome& outcome) {
  CertificateCheck c;
  if (outcome.farkas_ineq.size() != prog.h.size() ||
      outcome.farkas_eq.size() != prog.b.size()) {
    c.stationarity = std::numeric_limits<double>::infinity();
    return c;
  }
  VectorXd r = prog.G.transpose() * outcome.farkas_ineq;
  if (prog.b.size() > 0) r += prog.A.transpose() * outcome.farkas_eq;
  c.stationarity = r.size() > 0 ? r.lpNorm<Eigen::Infinity>() : 0.0;
  c.min_multiplier =
      outcome.farkas_ineq.size() > 0 ? outcome.farkas_ineq.minCoeff() : 0.0;
  c.value = prog.h.dot(outcome.farkas_ineq) + prog.b.dot(outcome.farkas_eq);
  return c;
}

namespace {

constexpr double kPrimalReg = 1e-11;
constexpr double kDualReg = 1e-11;

double inf_norm(const VectorXd& v) {
  return v.size() > 0 ? v.lpNorm<Eigen::Infinity>() : 0.0;
}

// Reduced Newton matrix [Q + GᵀWG + ρI, Aᵀ; A, −δI] with a pattern fixed at
// construction. Only the upper triangle is stored; refreshing W rewrites
// values in place so the symbolic analysis is done once.
class KktSystem {
 public:
  KktSystem(const SparseMatrix& Q, const SparseMatrix& G, const SparseMatrix& A)
      : n_(Q.rows()), me_(A.rows()), G_(G), Q_(Q), A_(A) {
    const Index dim = n_ + me_;
    std::vector<Eigen::Triplet<double>> trips;
    for (Index i = 0; i < dim; ++i) trips.emplace_back(i, i, 0.0);
    for (Index k = 0; k < Q.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(Q, k); it; ++it) {
        if (it.row() <= it.col()) trips.emplace_back(it.row(), it.col(), 0.0);
      }
    }
    // Row-wise view of G.
    const Eigen::SparseMatrix<double, Eigen::RowMajor> Gr(G);
    rows_.resize(static_cast<size_t>(G.rows()));
    for (Index i = 0; i < Gr.outerSize(); ++i) {
      auto& row = rows_[static_cast<size_t>(i)];
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Gr, i);
           it; ++it) {
        row.emplace_back(it.col(), it.value());
      }
      for (const auto& [j, gj] : row) {
        for (const auto& [k, gk] : row) {
          if (j <= k) trips.emplace_back(j, k, 0.0);
        }
      }
    }
    for (Index k = 0; k < A.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
        trips.emplace_back(it.col(), n_ + it.row(), 0.0);
      }
    }
    K_.resize(dim, dim);
    K_.setFromTriplets(trips.begin(), trips.end());
    K_.makeCompressed();

    base_ = VectorXd::Zero(K_.nonZeros());
    for (Index i = 0; i < n_; ++i) base_[slot(i, i)] += kPrimalReg;
    for (Index i = 0; i < me_; ++i) base_[slot(n_ + i, n_ + i)] -= kDualReg;
    for (Index k = 0; k < Q.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(Q, k); it; ++it) {
        if (it.row() <= it.col()) base_[slot(it.row(), it.col())] += it.value();
      }
    }
    for (Index k = 0; k < A.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
        base_[slot(it.col(), n_ + it.row())] += it.value();
      }
    }
    for (size_t i = 0; i < rows_.size(); ++i) {
      for (const auto& [j, gj] : rows_[i]) {
        for (const auto& [k, gk] : rows_[i]) {
          if (j <= k) products_.push_back({i, slot(j, k), gj * gk});
        }
      }
    }
    solver_.analyzePattern(K_);
  }

  bool factorize(const VectorXd& w) {
    w_ = w;
    double* values = K_.valuePtr();
    std::copy(base_.data(), base_.data() + base_.size(), values);
    for (const auto& p : products_) {
      values[p.slot] += w[static_cast<Index>(p.row)] * p.coef;
    }
    double diag_scale = 1.0;
    for (Index i = 0; i < n_; ++i) {
      diag_scale = std::max(diag_scale, std::abs(values[slot(i, i)]));
    }
    // Escalate the regularization when cancellation produces a zero pivot.
    for (double bump = 0.0; bump <= 1e-6; bump = bump == 0.0 ? 1e-14 : bump * 100) {
      if (bump > 0.0) {
        for (Index i = 0; i < n_; ++i) values[slot(i, i)] += bump * diag_scale;
        for (Index i = 0; i < me_; ++i) values[slot(n_ + i, n_ + i)] -= bump;
      }
      solver_.factorize(K_);
      if (solver_.info() == Eigen::Success &&
          solver_.vectorD().allFinite()) {
        return true;
      }
    }
    return false;
  }

  // Solves the unregularized reduced system, using the regularized factor
  // plus iterative refinement.
  void solve(const VectorXd& rx, const VectorXd& ry, VectorXd& dx,
             VectorXd& dy) const {
    VectorXd rhs(n_ + me_);
    rhs << rx, ry;
    VectorXd sol = solver_.solve(rhs);
    for (int it = 0; it < 3; ++it) {
      const VectorXd res = rhs - apply(sol);
      if (inf_norm(res) <= 1e-14 * (1.0 + inf_norm(rhs))) break;
      sol += solver_.solve(res);
    }
    dx = sol.head(n_);
    dy = sol.tail(me_);
  }

 private:
  struct Product {
    size_t row;
    Index slot;
    double coef;
  };

  Index slot(Index r, Index c) const {
    const auto* begin = K_.innerIndexPtr() + K_.outerIndexPtr()[c];
    const auto* end = K_.innerIndexPtr() + K_.outerIndexPtr()[c + 1];
    const auto* pos = std::lower_bound(begin, end, static_cast<int>(r));
    return static_cast<Index>(pos - K_.innerIndexPtr());
  }

  VectorXd apply(const VectorXd& v) const {
    const VectorXd vx = v.head(n_);
    const VectorXd vy = v.tail(me_);
    VectorXd out(n_ + me_);
    VectorXd top = Q_ * vx;
    if (G_.rows() > 0) {
      const VectorXd gv = G_ * vx;
      top += G_.transpose() * w_.cwiseProduct(gv);
    }
    if (me_ > 0) top += A_.transpose() * vy;
    out.head(n_) = top;
    if (me_ > 0) out.tail(me_) = A_ * vx;
    return out;
  }

  Index n_;
  Index me_;
  const SparseMatrix& G_;
  const SparseMatrix& Q_;
  const SparseMatrix& A_;
  std::vector<std::vector<std::pair<Index, double>>> rows_;
  std::vector<Product> products_;
  SparseMatrix K_;
  VectorXd base_;
  VectorXd w_;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Upper> solver_;
};

struct IpmResult {
  bool converged = false;
  bool loosely_converged = false;
  VectorXd x, s, z, y;
  int iterations = 0;
};

double max_step(const VectorXd& v, const VectorXd& dv) {
  double alpha = 1.0;
  for (Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) alpha = std::min(alpha, -v[i] / dv[i]);
  }
  return alpha;
}

// Mehrotra predictor-corrector on the (row-scaled) program.
IpmResult interior_point(const QuadraticProgram& p, const SolverSettings& cfg,
                         int max_iterations) {
  const Index n = p.q.size();
  const Index mi = p.h.size();
  const Index me = p.b.size();
  IpmResult r;

  KktSystem kkt(p.Q, p.G, p.A);
  const SparseMatrix Gt = p.G.transpose();
  const SparseMatrix At = p.A.transpose();

  // Initial point: minimize ½xᵀQx + qᵀx + ½‖Gx − h‖² subject to Ax = b.
  if (!kkt.factorize(VectorXd::Ones(mi))) return r;
  VectorXd x, y;
  kkt.solve(-p.q + Gt * p.h, p.b, x, y);
  VectorXd s = p.h - p.G * x;
  VectorXd z = -s;
  if (mi > 0) {
    const double ap = -s.minCoeff();
    if (ap >= -1e-8) s.array() += 1.0 + ap;
    const double ad = -z.minCoeff();
    if (ad >= -1e-8) z.array() += 1.0 + ad;
  }

  const double hnorm = std::max(inf_norm(p.h), inf_norm(p.b));
  const double qnorm = inf_norm(p.q);

  double best_merit = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter <= max_iterations; ++iter) {
    r.iterations = iter;
    const VectorXd Qx = p.Q * x;
    VectorXd rd = Qx + p.q;
    if (mi > 0) rd += Gt * z;
    if (me > 0) rd += At * y;
    const VectorXd ri = p.G * x + s - p.h;
    const VectorXd re = p.A * x - p.b;
    const double gap = mi > 0 ? s.dot(z) : 0.0;
    const double mu = mi > 0 ? gap / static_cast<double>(mi) : 0.0;
    const double pobj = 0.5 * x.dot(Qx) + p.q.dot(x);

    VectorXd gtz = mi > 0 ? VectorXd(Gt * z) : VectorXd::Zero(n);
    VectorXd aty = me > 0 ? VectorXd(At * y) : VectorXd::Zero(n);
    const double pres = std::max(inf_norm(ri), inf_norm(re)) / (1.0 + hnorm);
    const double dscale = std::max(
        {qnorm, inf_norm(Qx), inf_norm(gtz), inf_norm(aty)});
    const double dres = inf_norm(rd) / (1.0 + dscale);
    const double gres = gap / (1.0 + std::abs(pobj));
    if (!std::isfinite(pres) || !std::isfinite(dres) || !std::isfinite(gres)) {
      break;
    }
    const double merit = std::max({pres, dres, gres});
    if (merit < best_merit) {
      best_merit = merit;
      r.x = x;
      r.s = s;
      r.z = z;
      r.y = y;
      r.loosely_converged = merit <= 1e-9;
    }
    if (merit <= cfg.tol) {
      r.converged = true;
      return r;
    }
    // Complementarity exhausted while residuals stall: further steps only
    // amplify conditioning error.
    if (gres < 1e-15 && r.loosely_converged) break;
    if (iter == max_iterations) break;
    if (inf_norm(x) > 1e13 || inf_norm(z) > 1e15) break;

    const VectorXd w = z.cwiseQuotient(s);
    if (!kkt.factorize(w)) break;

    auto direction = [&](const VectorXd& rc, VectorXd& dx, VectorXd& ds,
                         VectorXd& dz, VectorXd& dy) {
      const VectorXd tmp = w.cwiseProduct(ri) - rc.cwiseQuotient(s);
      VectorXd rhs = -rd;
      if (mi > 0) rhs -= Gt * tmp;
      kkt.solve(rhs, -re, dx, dy);
      const VectorXd gdx = p.G * dx;
      ds = -ri - gdx;
      dz = w.cwiseProduct(ri + gdx) - rc.cwiseQuotient(s);
    };

    VectorXd dx, ds, dz, dy;
    const VectorXd sz = s.cwiseProduct(z);
    direction(sz, dx, ds, dz, dy);
    double alpha = std::min(max_step(s, ds), max_step(z, dz));
    if (mi > 0) {
      const double mu_aff =
          (s + alpha * ds).dot(z + alpha * dz) / static_cast<double>(mi);
      const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);
      const VectorXd rc =
          sz + ds.cwiseProduct(dz) - VectorXd::Constant(mi, sigma * mu);
      direction(rc, dx, ds, dz, dy);
      alpha = std::min(1.0, 0.99 * std::min(max_step(s, ds), max_step(z, dz)));
    }
    if (alpha < 1e-12) break;
    x += alpha * dx;
    s += alpha * ds;
    z += alpha * dz;
    y += alpha * dy;
  }
  return r;
}

// Scales each inequality row by its ∞-norm. Returns the scale factors.
VectorXd normalize_rows(SparseMatrix& G, VectorXd& h) {
  VectorXd scale = VectorXd::Ones(G.rows());
  VectorXd norms = VectorXd::Zero(G.rows());
  for (Index k = 0; k < G.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(G, k); it; ++it) {
      norms[it.row()] = std::max(norms[it.row()], std::abs(it.value()));
    }
  }
  for (Index i = 0; i < G.rows(); ++i) {
    if (norms[i] > 0.0) scale[i] = 1.0 / norms[i];
  }
  G = scale.asDiagonal() * G;
  h = scale.cwiseProduct(h);
  return scale;
}

// Phase-1 LP: minimize t s.t. Ĝx − t ≤ ĥ, ±(Âx − b̂) − t ≤ 0, t ≥ −1, with
// rows 2-norm normalized so t measures distance-like infeasibility.
struct PhaseOne {
  bool solved = false;
  double t = 0.0;
  VectorXd x;
  VectorXd farkas_ineq;
  VectorXd farkas_eq;
};

PhaseOne phase_one(const QuadraticProgram& p, const SolverSettings& cfg) {
  const Index n = p.q.size();
  const Index mi = p.h.size();
  const Index me = p.b.size();
  const Index rows = mi + 2 * me + 1;

  VectorXd norm_g = VectorXd::Zero(mi);
  VectorXd norm_a = VectorXd::Zero(me);
  for (Index k = 0; k < p.G.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(p.G, k); it; ++it) {
      norm_g[it.row()] += it.value() * it.value();
    }
  }
  for (Index k = 0; k < p.A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(p.A, k); it; ++it) {
      norm_a[it.row()] += it.value() * it.value();
    }
  }
  auto inv = [](double sq) { return sq > 0.0 ? 1.0 / std::sqrt(sq) : 1.0; };

  std::vector<Eigen::Triplet<double>> trips;
  VectorXd h1(rows);
  for (Index k = 0; k < p.G.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(p.G, k); it; ++it) {
      trips.emplace_back(it.row(), it.col(), it.value() * inv(norm_g[it.row()]));
    }
  }
  for (Index k = 0; k < p.A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(p.A, k); it; ++it) {
      const double v = it.value() * inv(norm_a[it.row()]);
      trips.emplace_back(mi + it.row(), it.col(), v);
      trips.emplace_back(mi + me + it.row(), it.col(), -v);
    }
  }
  for (Index i = 0; i < mi; ++i) h1[i] = p.h[i] * inv(norm_g[i]);
  for (Index i = 0; i < me; ++i) {
    h1[mi + i] = p.b[i] * inv(norm_a[i]);
    h1[mi + me + i] = -p.b[i] * inv(norm_a[i]);
  }
  for (Index i = 0; i + 1 < rows; ++i) trips.emplace_back(i, n, -1.0);
  trips.emplace_back(rows - 1, n, -1.0);
  h1[rows - 1] = 1.0;

  QuadraticProgram lp = QuadraticProgram::with_variables(n + 1);
  lp.q[n] = 1.0;
  lp.G.resize(rows, n + 1);
  lp.G.setFromTriplets(trips.begin(), trips.end());
  lp.h = h1;

  PhaseOne out;
  IpmResult res = interior_point(lp, cfg, 4 * cfg.max_iterations);
  if (!res.converged && !res.loosely_converged) return out;
  out.solved = true;
  out.t = res.x[n];
  out.x = res.x.head(n);
  out.farkas_ineq.resize(mi);
  out.farkas_eq.resize(me);
  for (Index i = 0; i < mi; ++i) {
    out.farkas_ineq[i] = std::max(0.0, res.z[i]) * inv(norm_g[i]);
  }
  for (Index i = 0; i < me; ++i) {
    out.farkas_eq[i] = (res.z[mi + i] - res.z[mi + me + i]) * inv(norm_a[i]);
  }
  return out;
}

// Looks for d with Qd = 0, Gd ≤ 0, Ad = 0, ‖d‖∞ ≤ 1 and qᵀd < 0.
std::optional<VectorXd> recession_ray(const QuadraticProgram& p,
                                      const SolverSettings& cfg) {
  const Index n = p.q.size();
  QuadraticProgram lp = QuadraticProgram::with_variables(n);
  lp.q = p.q;
  std::vector<Eigen::Triplet<double>> g;
  for (Index k = 0; k < p.G.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(p.G, k); it; ++it) {
      g.emplace_back(it.row(), it.col(), it.value());
    }
  }
  const Index mi = p.G.rows();
  for (Index i = 0; i < n; ++i) {
    g.emplace_back(mi + 2 * i, i, 1.0);
    g.emplace_back(mi + 2 * i + 1, i, -1.0);
  }
  lp.G.resize(mi + 2 * n, n);
  lp.G.setFromTriplets(g.begin(), g.end());
  lp.h = VectorXd::Zero(mi + 2 * n);
  lp.h.tail(2 * n).setOnes();
  std::vector<Eigen::Triplet<double>> a;
  for (Index k = 0; k < p.A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(p.A, k); it; ++it) {
      a.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (Index k = 0; k < p.Q.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(p.Q, k); it; ++it) {
      a.emplace_back(p.A.rows() + it.row(), it.col(), it.value());
    }
  }
  lp.A.resize(p.A.rows() + p.Q.rows(), n);
  lp.A.setFromTriplets(a.begin(), a.end());
  lp.b = VectorXd::Zero(lp.A.rows());
  IpmResult res = interior_point(lp, cfg, 4 * cfg.max_iterations);
  if (!res.converged && !res.loosely_converged) return std::nullopt;
  if (p.q.dot(res.x) < -1e-7) return res.x;
  return std::nullopt;
}

}  // namespace

SolveOutcome solve_qp(const QuadraticProgram& prog,
                      const SolverSettings& settings) {
  const auto start = std::chrono::steady_clock::now();
  prog.validate();
  SolveOutcome out;
  auto finish = [&]() -> SolveOutcome {
    out.solve_time = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    return out;
  };
  auto accept = [&](const IpmResult& res, const QuadraticProgram& scaled,
                    const VectorXd& scale) {
    out.status = SolveStatus::kOptimal;
    out.x = res.x;
    out.z = scale.cwiseProduct(res.z);
    out.y = res.y;
    out.objective = prog.objective(res.x);
    out.iterations += res.iterations;
    (void)scaled;
  };

  QuadraticProgram scaled = prog;
  const VectorXd scale = normalize_rows(scaled.G, scaled.h);

  IpmResult res = interior_point(scaled, settings, settings.max_iterations);
  out.iterations = res.iterations;
  if (res.converged) {
    accept(res, scaled, scale);
    return finish();
  }

  // Classification: infeasible, unbounded, or numerically hard.
  PhaseOne p1 = phase_one(prog, settings);
  if (!p1.solved) {
    if (res.loosely_converged) {
      accept(res, scaled, scale);
      return finish();
    }
    out.status = SolveStatus::kNumericalFailure;
    return finish();
  }
  if (p1.t > settings.feasibility_tol) {
    out.farkas_ineq = p1.farkas_ineq;
    out.farkas_eq = p1.farkas_eq;
    const CertificateCheck check = check_certificate(prog, out);
    out.status = check.valid() ? SolveStatus::kInfeasible
                               : SolveStatus::kNumericalFailure;
    return finish();
  }
  if (res.loosely_converged) {
    accept(res, scaled, scale);
    return finish();
  }
  if (auto ray = recession_ray(prog, settings)) {
    out.status = SolveStatus::kUnbounded;
    out.ray = *ray;
    return finish();
  }
  // Feasible but thin: relax each row by the phase-1 margin and retry.
  QuadraticProgram relaxed = scaled;
  const double margin = std::max(p1.t, 0.0) + settings.feasibility_tol;
  VectorXd row_norm = VectorXd::Zero(relaxed.h.size());
  for (Index k = 0; k < relaxed.G.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(relaxed.G, k); it; ++it) {
      row_norm[it.row()] += it.value() * it.value();
    }
  }
  for (Index i = 0; i < relaxed.h.size(); ++i) {
    relaxed.h[i] += margin * std::sqrt(row_norm[i]);
  }
  IpmResult retry =
      interior_point(relaxed, settings, 4 * settings.max_iterations);
  if (retry.converged || retry.loosely_converged) {
    accept(retry, scaled, scale);
    return finish();
  }
  out.status = SolveStatus::kNumericalFailure;
  return finish();
}

SolveOutcome solve_lp(const VectorXd& c, const SparseMatrix& G,
                      const VectorXd& h, const SolverSettings& settings) {
  QuadraticProgram p = QuadraticProgram::with_variables(c.size());
  p.q = c;
  p.G = G;
  p.h = h;
  return solve_qp(p, settings);
}

SolveOutcome solve_lp(const VectorXd& c, const Eigen::MatrixXd& G,
                      const VectorXd& h, const SolverSettings& settings) {
  return solve_lp(c, SparseMatrix(G.sparseView()), h, settings);
}

}  // namespace rmpc
