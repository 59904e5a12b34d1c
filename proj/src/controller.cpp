#include "rmpc/controller.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "rmpc/error.hpp"
#include "rmpc/problem.hpp"

namespace rmpc {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

using Triplet = Eigen::Triplet<double>;
using Clock = std::chrono::steady_clock;

VectorXd simplex_weights(Index n, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  VectorXd w(n);
  for (Index i = 0; i < n; ++i) w[i] = expo(rng);
  return w / w.sum();
}

SparseMatrix dense_to_sparse(const MatrixXd& M) {
  SparseMatrix S = M.sparseView(0.0, 0.0);
  S.makeCompressed();
  return S;
}

// Index of the row equal to −H.row(i) (after normalization), or −1.
std::vector<Index> opposite_rows(const MatrixXd& H) {
  const Index rows = H.rows();
  std::vector<Index> partner(static_cast<size_t>(rows), -1);
  MatrixXd Hn = H;
  for (Index i = 0; i < rows; ++i) {
    const double n = H.row(i).norm();
    if (n > 0.0) Hn.row(i) /= n;
  }
  for (Index i = 0; i < rows; ++i) {
    if (partner[static_cast<size_t>(i)] >= 0) continue;
    for (Index j = i + 1; j < rows; ++j) {
      if (partner[static_cast<size_t>(j)] >= 0) continue;
      if ((Hn.row(i) + Hn.row(j)).lpNorm<Eigen::Infinity>() <= 1e-12) {
        partner[static_cast<size_t>(i)] = j;
        partner[static_cast<size_t>(j)] = i;
        break;
      }
    }
  }
  return partner;
}

}  // namespace

double spectral_radius(const MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  return Eigen::EigenSolver<MatrixXd>(A, false).eigenvalues().cwiseAbs().maxCoeff();
}

MatrixXd lyapunov_series(const MatrixXd& A, const MatrixXd& S) {
  const double rho = spectral_radius(A);
  if (!(rho < 1.0)) {
    throw Error(ErrorCode::kLyapunovDivergence,
                "Lyapunov series diverges: spectral radius " + std::to_string(rho));
  }
  MatrixXd X = S;
  MatrixXd Ak = A;
  for (int iter = 0; iter < 200; ++iter) {
    const MatrixXd inc = Ak.transpose() * X * Ak;
    X += inc;
    Ak = (Ak * Ak).eval();
    if (inc.lpNorm<Eigen::Infinity>() <= 1e-17 * X.lpNorm<Eigen::Infinity>()) break;
    if (!X.allFinite()) break;
  }
  if (!X.allFinite()) {
    throw Error(ErrorCode::kLyapunovDivergence, "Lyapunov series overflowed");
  }
  return 0.5 * (X + X.transpose());
}

double lyapunov_residual(const MatrixXd& A, const MatrixXd& S, const MatrixXd& P_N) {
  MatrixXd E = -P_N + S + A.transpose() * P_N * A;
  E = 0.5 * (E + E.transpose());
  return Eigen::SelfAdjointEigenSolver<MatrixXd>(E, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .maxCoeff();
}

double invariance_violation(const Polytope& X_N, std::span<const MatrixXd> closed_loop,
                            const Polytope& W) {
  const Polytope T = X_N.normalized();
  double worst = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < T.num_facets(); ++i) {
    const VectorXd f = T.H().row(i).transpose();
    const double sw = W.support(f);
    for (const MatrixXd& A : closed_loop) {
      worst = std::max(worst, X_N.support(A.transpose() * f) + sw - T.h()[i]);
    }
  }
  return worst;
}

TerminalComponents synthesize_terminal(const UncertainSystem& sys, const MatrixXd& K,
                                       const MatrixXd& P, const MatrixXd& R,
                                       const TerminalOptions& options) {
  sys.validate();
  const Index d = sys.state_dim();
  const Index m = sys.input_dim();
  if (P.rows() != d || P.cols() != d || R.rows() != m || R.cols() != m) {
    throw Error(ErrorCode::kDimensionMismatch, "synthesize_terminal: P/R shapes");
  }
  TerminalComponents out;
  out.K = K;
  const std::vector<MatrixXd> vertices = sys.closed_loop_vertices(K);
  const size_t nb = sys.deltaB_vertices.size();
  for (size_t v = 0; v < vertices.size(); ++v) {
    const double rho = spectral_radius(vertices[v]);
    out.max_vertex_radius = std::max(out.max_vertex_radius, rho);
    if (!(rho < 1.0)) {
      throw Error(ErrorCode::kVertexUnstable,
                  "closed loop at vertex pair (deltaA " + std::to_string(v / nb) +
                      ", deltaB " + std::to_string(v % nb) + ") has spectral radius " +
                      std::to_string(rho));
    }
  }
  std::mt19937_64 rng(options.seed);
  for (int s = 0; s < options.hull_samples; ++s) {
    const VectorXd a = simplex_weights(static_cast<Index>(sys.deltaA_vertices.size()), rng);
    const VectorXd b = simplex_weights(static_cast<Index>(nb), rng);
    MatrixXd dA = MatrixXd::Zero(d, d), dB = MatrixXd::Zero(d, m);
    for (size_t j = 0; j < sys.deltaA_vertices.size(); ++j) {
      dA += a[static_cast<Index>(j)] * sys.deltaA_vertices[j];
    }
    for (size_t k = 0; k < nb; ++k) dB += b[static_cast<Index>(k)] * sys.deltaB_vertices[k];
    const double rho = spectral_radius(sys.A_bar + dA + (sys.B_bar + dB) * K);
    out.max_sampled_radius = std::max(out.max_sampled_radius, rho);
    if (!(rho < 1.0)) {
      throw Error(ErrorCode::kVertexUnstable,
                  "closed loop at sampled hull point " + std::to_string(s) +
                      " has spectral radius " + std::to_string(rho));
    }
  }

  const Polytope constraints = sys.X.intersect(sys.U.preimage(K));
  std::optional<Polytope> omega =
      max_robust_invariant(constraints, vertices, sys.W, options.max_iter);
  if (!omega) {
    throw Error(ErrorCode::kEmptyTerminalSet, "maximal robust invariant set is empty");
  }
  out.X_N = std::move(*omega);
  out.invariance_residual = invariance_violation(out.X_N, vertices, sys.W);

  const MatrixXd A_cl = sys.nominal_closed_loop(K);
  out.nominal_radius = spectral_radius(A_cl);
  const MatrixXd S = P + K.transpose() * R * K;
  out.P_N = lyapunov_series(A_cl, S);
  out.lyapunov_residual = lyapunov_residual(A_cl, S, out.P_N);
  if (out.lyapunov_residual > 1e-8 ||
      Eigen::LLT<MatrixXd>(out.P_N).info() != Eigen::Success) {
    throw Error(ErrorCode::kLyapunovDivergence,
                "terminal cost residual " + std::to_string(out.lyapunov_residual));
  }
  return out;
}

MPCConfig make_config(const Problem& problem, const TerminalOptions& options) {
  MPCConfig cfg;
  cfg.P = problem.P;
  cfg.R = problem.R;
  cfg.N = problem.N;
  cfg.terminal = synthesize_terminal(problem.sys, problem.K, problem.P, problem.R, options);
  cfg.bound = net_additive_bound(problem.sys);
  return cfg;
}

FeedbackGainStack HorizonProblem::gains(const VectorXd& z) const {
  FeedbackGainStack M(horizon, m, d);
  Index idx = gain_offset_;
  for (const auto& [k, l] : gain_blocks_) {
    MatrixXd block(m, d);
    for (Index r = 0; r < m; ++r) {
      for (Index c = 0; c < d; ++c) block(r, c) = z[idx++];
    }
    M.set_block(k, l, block);
  }
  return M;
}

VectorXd HorizonProblem::pack(const VectorXd& u_bar, const FeedbackGainStack& M) const {
  if (u_bar.size() != m * horizon) {
    throw Error(ErrorCode::kDimensionMismatch, "pack: u_bar size");
  }
  VectorXd z = VectorXd::Zero(qp.num_variables());
  z.head(m * horizon) = u_bar;
  Index idx = gain_offset_;
  for (const auto& [k, l] : gain_blocks_) {
    const MatrixXd block = M.block(k, l);
    for (Index r = 0; r < m; ++r) {
      for (Index c = 0; c < d; ++c) z[idx++] = block(r, c);
    }
  }
  const VectorXd Gz = qp.G * z;
  for (size_t a = 0; a < aux_source_row_.size(); ++a) {
    const Index row = aux_source_row_[a];
    z[aux_offset_ + static_cast<Index>(a)] = std::abs(Gz[row] - qp.h[row]);
  }
  return z;
}

VectorXd HorizonProblem::robust_row_values(const VectorXd& u_bar,
                                           const FeedbackGainStack& M) const {
  const VectorXd Gz = qp.G * pack(u_bar, M);
  VectorXd out(num_state_rows() + num_input_rows());
  Index i = 0;
  for (const auto* rows : {&state_rows_, &input_rows_}) {
    for (const RowInfo& r : *rows) out[i++] = Gz[r.qp_row] + r.offset;
  }
  return out;
}

VectorXd HorizonProblem::robust_row_bounds() const {
  VectorXd out(num_state_rows() + num_input_rows());
  Index i = 0;
  for (const auto* rows : {&state_rows_, &input_rows_}) {
    for (const RowInfo& r : *rows) out[i++] = r.bound;
  }
  return out;
}

HorizonProblem build_case1(const UncertainSystem& sys, const MPCConfig& cfg,
                           const VectorXd& x) {
  const Index d = sys.state_dim();
  const Index m = sys.input_dim();
  if (x.size() != d) throw Error(ErrorCode::kDimensionMismatch, "build_case1: state size");
  const MatrixXd& P_N = cfg.terminal.P_N;
  const Polytope& T = cfg.terminal.X_N;

  HorizonProblem hp;
  hp.horizon = 1;
  hp.m = m;
  hp.d = d;
  hp.gain_offset_ = m;
  hp.aux_offset_ = m;
  hp.qp = QuadraticProgram::with_variables(m);
  const VectorXd Ax = sys.A_bar * x;
  hp.qp.Q = dense_to_sparse(2.0 * (cfg.R + sys.B_bar.transpose() * P_N * sys.B_bar));
  hp.qp.q = 2.0 * sys.B_bar.transpose() * P_N * Ax;
  hp.constant = x.dot(cfg.P * x) + Ax.dot(P_N * Ax);

  VectorXd support_w(T.num_facets());
  for (Index i = 0; i < T.num_facets(); ++i) {
    support_w[i] = sys.W.support(T.H().row(i).transpose());
  }
  const Index pairs =
      static_cast<Index>(sys.deltaA_vertices.size() * sys.deltaB_vertices.size());
  const Index rows = pairs * T.num_facets() + sys.U.num_facets();
  MatrixXd G(rows, m);
  VectorXd h(rows);
  Index row = 0;
  for (const MatrixXd& dA : sys.deltaA_vertices) {
    const VectorXd Ajx = (sys.A_bar + dA) * x;
    for (const MatrixXd& dB : sys.deltaB_vertices) {
      const MatrixXd Bk = sys.B_bar + dB;
      for (Index i = 0; i < T.num_facets(); ++i) {
        G.row(row) = T.H().row(i) * Bk;
        const double offset = T.H().row(i).dot(Ajx) + support_w[i];
        h[row] = T.h()[i] - offset;
        hp.state_rows_.push_back({row, offset, T.h()[i]});
        ++row;
      }
    }
  }
  for (Index i = 0; i < sys.U.num_facets(); ++i) {
    G.row(row) = sys.U.H().row(i);
    h[row] = sys.U.h()[i];
    hp.input_rows_.push_back({row, 0.0, sys.U.h()[i]});
    ++row;
  }
  hp.qp.G = dense_to_sparse(G);
  hp.qp.h = h;
  return hp;
}

HorizonProblem build_lumped(const UncertainSystem& sys, const MatrixXd& P, const MatrixXd& R,
                            const MatrixXd& P_N, const Polytope& terminal_set,
                            double w_tilde_max, const VectorXd& x, int horizon) {
  const Index d = sys.state_dim();
  const Index m = sys.input_dim();
  if (x.size() != d) throw Error(ErrorCode::kDimensionMismatch, "build_lumped: state size");
  if (horizon < 1) throw Error(ErrorCode::kInvalidProblem, "build_lumped: horizon < 1");
  const Index N = horizon;
  const double wmax = w_tilde_max;

  HorizonProblem hp;
  hp.horizon = horizon;
  hp.m = m;
  hp.d = d;
  hp.gain_offset_ = m * N;
  Index next_var = m * N;
  std::vector<std::vector<Index>> gain_index(static_cast<size_t>(N),
                                             std::vector<Index>(static_cast<size_t>(N), -1));
  for (Index k = 1; k < N; ++k) {
    for (Index l = 0; l < k; ++l) {
      hp.gain_blocks_.emplace_back(static_cast<int>(k), static_cast<int>(l));
      gain_index[static_cast<size_t>(k)][static_cast<size_t>(l)] = next_var;
      next_var += m * d;
    }
  }
  hp.aux_offset_ = next_var;

  std::vector<MatrixXd> Apow{MatrixXd::Identity(d, d)};
  for (Index k = 1; k <= N; ++k) Apow.push_back(sys.A_bar * Apow.back());
  std::vector<MatrixXd> CB;
  for (Index k = 0; k < N; ++k) CB.push_back(Apow[static_cast<size_t>(k)] * sys.B_bar);

  std::vector<Triplet> trips;
  std::vector<double> rhs;
  Index row = 0;

  // Adds "Σ coef·gain − a ≤ −g" and "−Σ coef·gain − a ≤ g" for a fresh aux a,
  // or returns −1 when the entry does not depend on the gains.
  struct GainTerm {
    Index var;
    double coef;
  };
  auto add_abs = [&](const std::vector<GainTerm>& terms, double g) -> Index {
    bool depends = false;
    for (const GainTerm& t : terms) depends = depends || t.coef != 0.0;
    if (!depends) return -1;
    const Index a = next_var++;
    for (double sign : {1.0, -1.0}) {
      for (const GainTerm& t : terms) {
        if (t.coef != 0.0) trips.emplace_back(row, t.var, sign * t.coef);
      }
      trips.emplace_back(row, a, -1.0);
      rhs.push_back(-sign * g);
      if (sign > 0.0) hp.aux_source_row_.push_back(row);
      ++row;
    }
    return a;
  };

  // Aux rows are emitted as they are created; main rows are appended afterwards.
  struct MainRow {
    std::vector<std::pair<Index, double>> coefs;
    double rhs;
    double offset;
    double bound;
    bool state;
  };
  std::vector<MainRow> main_rows;

  for (Index i = 0; i < N; ++i) {
    const bool terminal = i == N - 1;
    const Polytope& S = terminal ? terminal_set : sys.X;
    const std::vector<Index> partner = opposite_rows(S.H());
    std::vector<std::vector<Index>> aux_of(static_cast<size_t>(S.num_facets()));
    std::vector<double> const_abs(static_cast<size_t>(S.num_facets()), 0.0);
    const VectorXd Aix = Apow[static_cast<size_t>(i + 1)] * x;
    for (Index r = 0; r < S.num_facets(); ++r) {
      const Eigen::RowVectorXd f = S.H().row(r);
      const Index p = partner[static_cast<size_t>(r)];
      if (p >= 0 && p < r) {
        // |v| for −f equals |v| for f, up to the positive scale between rows.
        const double scale = S.H().row(r).norm() / S.H().row(p).norm();
        MainRow mr;
        for (Index a : aux_of[static_cast<size_t>(p)]) mr.coefs.emplace_back(a, wmax * scale);
        aux_of[static_cast<size_t>(r)] = aux_of[static_cast<size_t>(p)];
        const_abs[static_cast<size_t>(r)] = const_abs[static_cast<size_t>(p)] * scale;
        for (Index k = 0; k <= i; ++k) {
          const Eigen::RowVectorXd c = f * CB[static_cast<size_t>(i - k)];
          for (Index j = 0; j < m; ++j) {
            if (c[j] != 0.0) mr.coefs.emplace_back(k * m + j, c[j]);
          }
        }
        const double offset = f.dot(Aix) + wmax * (f.lpNorm<1>() + const_abs[static_cast<size_t>(r)]);
        mr.offset = offset;
        mr.bound = S.h()[r];
        mr.rhs = S.h()[r] - offset;
        mr.state = true;
        main_rows.push_back(std::move(mr));
        continue;
      }
      MainRow mr;
      double folded = 0.0;
      for (Index l = 0; l < i; ++l) {
        const Eigen::RowVectorXd g = f * Apow[static_cast<size_t>(i - l)];
        for (Index c = 0; c < d; ++c) {
          std::vector<GainTerm> terms;
          for (Index k = l + 1; k <= i; ++k) {
            const Eigen::RowVectorXd fcb = f * CB[static_cast<size_t>(i - k)];
            const Index base = gain_index[static_cast<size_t>(k)][static_cast<size_t>(l)];
            for (Index rr = 0; rr < m; ++rr) terms.push_back({base + rr * d + c, fcb[rr]});
          }
          const Index a = add_abs(terms, g[c]);
          if (a < 0) {
            folded += std::abs(g[c]);
          } else {
            aux_of[static_cast<size_t>(r)].push_back(a);
            mr.coefs.emplace_back(a, wmax);
          }
        }
      }
      const_abs[static_cast<size_t>(r)] = folded;
      for (Index k = 0; k <= i; ++k) {
        const Eigen::RowVectorXd c = f * CB[static_cast<size_t>(i - k)];
        for (Index j = 0; j < m; ++j) {
          if (c[j] != 0.0) mr.coefs.emplace_back(k * m + j, c[j]);
        }
      }
      const double offset = f.dot(Aix) + wmax * (f.lpNorm<1>() + folded);
      mr.offset = offset;
      mr.bound = S.h()[r];
      mr.rhs = S.h()[r] - offset;
      mr.state = true;
      main_rows.push_back(std::move(mr));
    }
  }

  const std::vector<Index> upartner = opposite_rows(sys.U.H());
  for (Index k = 0; k < N; ++k) {
    std::vector<std::vector<Index>> aux_of(static_cast<size_t>(sys.U.num_facets()));
    for (Index r = 0; r < sys.U.num_facets(); ++r) {
      const Eigen::RowVectorXd g = sys.U.H().row(r);
      const Index p = upartner[static_cast<size_t>(r)];
      MainRow mr;
      if (p >= 0 && p < r) {
        const double scale = g.norm() / sys.U.H().row(p).norm();
        aux_of[static_cast<size_t>(r)] = aux_of[static_cast<size_t>(p)];
        for (Index a : aux_of[static_cast<size_t>(r)]) mr.coefs.emplace_back(a, wmax * scale);
      } else {
        for (Index l = 0; l < k; ++l) {
          const Index base = gain_index[static_cast<size_t>(k)][static_cast<size_t>(l)];
          for (Index c = 0; c < d; ++c) {
            std::vector<GainTerm> terms;
            for (Index rr = 0; rr < m; ++rr) terms.push_back({base + rr * d + c, g[rr]});
            const Index a = add_abs(terms, 0.0);
            if (a >= 0) {
              aux_of[static_cast<size_t>(r)].push_back(a);
              mr.coefs.emplace_back(a, wmax);
            }
          }
        }
      }
      for (Index j = 0; j < m; ++j) {
        if (g[j] != 0.0) mr.coefs.emplace_back(k * m + j, g[j]);
      }
      mr.offset = 0.0;
      mr.bound = sys.U.h()[r];
      mr.rhs = sys.U.h()[r];
      mr.state = false;
      main_rows.push_back(std::move(mr));
    }
  }

  for (const MainRow& mr : main_rows) {
    for (const auto& [var, coef] : mr.coefs) trips.emplace_back(row, var, coef);
    rhs.push_back(mr.rhs);
    (mr.state ? hp.state_rows_ : hp.input_rows_).push_back({row, mr.offset, mr.bound});
    ++row;
  }

  const Index n = next_var;
  hp.qp = QuadraticProgram::with_variables(n);
  hp.qp.G.resize(row, n);
  hp.qp.G.setFromTriplets(trips.begin(), trips.end());
  hp.qp.G.makeCompressed();
  hp.qp.h = Eigen::Map<const VectorXd>(rhs.data(), static_cast<Index>(rhs.size()));

  // Cost over [x_t; A_stack x + C ū; ū] with P, …, P, P_N and R blocks.
  const StackedDynamics S = build_stacked(sys.A_bar, sys.B_bar, horizon);
  MatrixXd Qx = MatrixXd::Zero(d * N, d * N);
  for (Index i = 0; i < N; ++i) Qx.block(i * d, i * d, d, d) = (i == N - 1) ? P_N : P;
  MatrixXd Hu = S.C.transpose() * Qx * S.C;
  for (Index k = 0; k < N; ++k) Hu.block(k * m, k * m, m, m) += R;
  Hu = 0.5 * (Hu + Hu.transpose());
  const VectorXd free = S.A_stack * x;
  std::vector<Triplet> qtrips;
  for (Index i = 0; i < m * N; ++i) {
    for (Index j = 0; j < m * N; ++j) {
      if (Hu(i, j) != 0.0) qtrips.emplace_back(i, j, 2.0 * Hu(i, j));
    }
  }
  hp.qp.Q.resize(n, n);
  hp.qp.Q.setFromTriplets(qtrips.begin(), qtrips.end());
  hp.qp.q.head(m * N) = 2.0 * S.C.transpose() * Qx * free;
  hp.constant = x.dot(P * x) + free.dot(Qx * free);
  return hp;
}

HorizonProblem build_caseN(const UncertainSystem& sys, const MPCConfig& cfg,
                           const VectorXd& x, int horizon) {
  if (horizon < 2 || horizon > cfg.N) {
    throw Error(ErrorCode::kInvalidProblem,
                "build_caseN: horizon " + std::to_string(horizon) + " outside [2, " +
                    std::to_string(cfg.N) + "]");
  }
  return build_lumped(sys, cfg.P, cfg.R, cfg.terminal.P_N, cfg.terminal.X_N,
                      cfg.bound.w_tilde_max, x, horizon);
}

double nominal_cost(const UncertainSystem& sys, const MatrixXd& P, const MatrixXd& R,
                    const MatrixXd& P_N, const VectorXd& x, const VectorXd& u_bar_stack) {
  const Index m = sys.input_dim();
  const Index N = u_bar_stack.size() / m;
  VectorXd xk = x;
  double J = x.dot(P * x);
  for (Index k = 0; k < N; ++k) {
    const VectorXd u = u_bar_stack.segment(k * m, m);
    J += u.dot(R * u);
    xk = sys.A_bar * xk + sys.B_bar * u;
    J += xk.dot((k == N - 1 ? P_N : P) * xk);
  }
  return J;
}

MPCSolution solve_horizon(const HorizonProblem& problem) {
  const SolveOutcome out = solve_qp(problem.qp);
  MPCSolution sol;
  sol.status = out.status;
  sol.N_star = problem.horizon;
  sol.M_star = FeedbackGainStack(problem.horizon, problem.m, problem.d);
  HorizonResult hr;
  hr.horizon = problem.horizon;
  hr.status = out.status;
  hr.solve_time = out.solve_time;
  if (out.optimal()) {
    sol.u_bar_star = problem.u_bar(out.x);
    sol.M_star = problem.gains(out.x);
    sol.J_star = out.objective + problem.constant;
    hr.cost = sol.J_star;
  } else if (out.status == SolveStatus::kInfeasible) {
    hr.certificate_valid = check_certificate(problem.qp, out).valid();
  }
  sol.per_horizon.push_back(hr);
  return sol;
}

MPCSolution adaptive_solve(const UncertainSystem& sys, const MPCConfig& cfg,
                           const VectorXd& x) {
  MPCSolution best;
  best.status = SolveStatus::kInfeasible;
  best.M_star = FeedbackGainStack(1, sys.input_dim(), sys.state_dim());
  std::vector<HorizonResult> results;
  bool numerical = false;
  for (int N = 1; N <= cfg.N; ++N) {
    const auto start = Clock::now();
    const HorizonProblem hp = N == 1 ? build_case1(sys, cfg, x) : build_caseN(sys, cfg, x, N);
    MPCSolution sol = solve_horizon(hp);
    HorizonResult hr = sol.per_horizon.front();
    hr.solve_time = std::chrono::duration<double>(Clock::now() - start).count();
    results.push_back(hr);
    if (sol.status == SolveStatus::kNumericalFailure) numerical = true;
    if (!sol.optimal()) continue;
    if (!best.optimal() ||
        sol.J_star < best.J_star - kCostTieTol * (1.0 + std::abs(best.J_star))) {
      best = std::move(sol);
    }
  }
  if (!best.optimal() && numerical) best.status = SolveStatus::kNumericalFailure;
  best.per_horizon = std::move(results);
  return best;
}

VectorXd mpc_step(const UncertainSystem& sys, const MPCConfig& cfg, const VectorXd& x,
                  MPCSolution* solution) {
  MPCSolution sol = adaptive_solve(sys, cfg, x);
  if (!sol.optimal()) {
    std::string detail;
    for (const HorizonResult& hr : sol.per_horizon) {
      detail += " N=" + std::to_string(hr.horizon) + ":" + std::string(to_string(hr.status));
    }
    if (solution) *solution = sol;
    throw Error(sol.status == SolveStatus::kNumericalFailure ? ErrorCode::kNumericalFailure
                                                             : ErrorCode::kAllHorizonsInfeasible,
                "no feasible horizon;" + detail);
  }
  VectorXd u = sol.applied_input();
  if (solution) *solution = std::move(sol);
  return u;
}

double iss_candidate_cost(const UncertainSystem& sys, const MPCConfig& cfg,
                          const MPCSolution& sol, const VectorXd& x_next,
                          const VectorXd& w_tilde) {
  const MatrixXd& P_N = cfg.terminal.P_N;
  if (sol.N_star <= 1) {
    const MatrixXd& K = cfg.terminal.K;
    const VectorXd u = K * x_next;
    const VectorXd xn = sys.nominal_closed_loop(K) * x_next;
    return x_next.dot(cfg.P * x_next) + u.dot(cfg.R * u) + xn.dot(P_N * xn);
  }
  const Index m = sys.input_dim();
  const int n = sol.N_star - 1;
  VectorXd shifted(m * n);
  for (int k = 0; k < n; ++k) {
    shifted.segment(k * m, m) =
        sol.u_bar_star.segment((k + 1) * m, m) + sol.M_star.block(k + 1, 0) * w_tilde;
  }
  return nominal_cost(sys, cfg.P, cfg.R, P_N, x_next, shifted);
}

VectorXd reconstruct_disturbance(const UncertainSystem& sys, const VectorXd& x,
                                 const VectorXd& u, const VectorXd& x_next) {
  return x_next - sys.A_bar * x - sys.B_bar * u;
}

RolloutPolicy::RolloutPolicy(const UncertainSystem& sys, MPCSolution solution, MatrixXd K)
    : A_bar_(sys.A_bar), B_bar_(sys.B_bar), solution_(std::move(solution)), K_(std::move(K)) {
  if (!solution_.optimal()) {
    throw Error(ErrorCode::kAllHorizonsInfeasible, "rollout needs an optimal solution");
  }
}

VectorXd RolloutPolicy::input(int t, std::span<const VectorXd> states,
                              std::span<const VectorXd> inputs) const {
  if (t < 0 || static_cast<int>(states.size()) != t + 1 ||
      static_cast<int>(inputs.size()) != t) {
    throw Error(ErrorCode::kHistoryLengthMismatch,
                "rollout at t=" + std::to_string(t) + " needs " + std::to_string(t + 1) +
                    " states and " + std::to_string(t) + " inputs, got " +
                    std::to_string(states.size()) + " and " + std::to_string(inputs.size()));
  }
  if (t >= solution_.N_star) return K_ * states[static_cast<size_t>(t)];
  std::vector<VectorXd> history;
  history.reserve(static_cast<size_t>(t));
  for (int l = 0; l < t; ++l) {
    const auto i = static_cast<size_t>(l);
    history.push_back(states[i + 1] - A_bar_ * states[i] - B_bar_ * inputs[i]);
  }
  return policy_input(solution_.M_star, solution_.u_bar_star, t, history);
}

}  // namespace rmpc
