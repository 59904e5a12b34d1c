#include "rmpc/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "rmpc/error.hpp"

namespace rmpc {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void record_margins(const UncertainSystem& sys, const VectorXd& x, const VectorXd& u,
                    double tol, StepRecord& rec, SimulationTrace& trace) {
  rec.state_margin = sys.X.margin(x);
  rec.input_margin = sys.U.margin(u);
  rec.margin = std::min(rec.state_margin, rec.input_margin);
  if (rec.state_margin < -tol) ++trace.state_violations;
  if (rec.input_margin < -tol) ++trace.input_violations;
}

VectorXd step_true(const UncertainSystem& sys, const UncertaintyRealization& r,
                   const VectorXd& x, const VectorXd& u, int t) {
  return (sys.A_bar + r.deltaA_true) * x + (sys.B_bar + r.deltaB_true) * u +
         r.w_sequence[static_cast<size_t>(t)];
}

void check_realization(const UncertaintyRealization& r, int steps) {
  if (static_cast<int>(r.w_sequence.size()) < steps) {
    throw Error(ErrorCode::kHistoryLengthMismatch,
                "realization holds " + std::to_string(r.w_sequence.size()) +
                    " disturbances, simulation needs " + std::to_string(steps));
  }
}

}  // namespace

SimulationTrace simulate_closed_loop(const UncertainSystem& sys, const MPCConfig& cfg,
                                     const VectorXd& x0, int steps,
                                     const UncertaintyRealization& realization,
                                     const SimulationOptions& options) {
  check_realization(realization, steps);
  SimulationTrace trace;
  trace.states.push_back(x0);
  if (sys.X.margin(x0) < -options.margin_tol) ++trace.state_violations;

  MPCSolution sol = adaptive_solve(sys, cfg, x0);
  for (int t = 0; t < steps; ++t) {
    const VectorXd& x = trace.states.back();
    if (!sol.optimal()) {
      if (sol.status == SolveStatus::kNumericalFailure) {
        trace.numerical_failure = true;
      } else {
        trace.infeasible_step = t;
      }
      break;
    }
    StepRecord rec;
    rec.N_star = sol.N_star;
    rec.J_star = sol.J_star;
    for (const HorizonResult& hr : sol.per_horizon) rec.solve_time += hr.solve_time;
    const VectorXd u = sol.applied_input();
    record_margins(sys, x, u, options.margin_tol, rec, trace);

    const VectorXd xn = step_true(sys, realization, x, u, t);
    const VectorXd wt = reconstruct_disturbance(sys, x, u, xn);
    trace.inputs.push_back(u);
    trace.w_tilde.push_back(wt);
    trace.states.push_back(xn);
    if (sys.X.margin(xn) < -options.margin_tol) ++trace.state_violations;

    MPCSolution next = adaptive_solve(sys, cfg, xn);
    rec.iss_gap = kNaN;
    rec.iss_tol = kNaN;
    if (options.check_iss && next.optimal()) {
      const double q = iss_candidate_cost(sys, cfg, sol, xn, wt);
      rec.iss_gap = next.J_star - q;
      rec.iss_tol = 1e-6 * (1.0 + std::abs(next.J_star));
      ++trace.iss_checks;
      if (rec.iss_gap > rec.iss_tol) ++trace.iss_violations;
    }
    trace.steps.push_back(rec);
    if (trace.state_violations > 0 || trace.input_violations > 0) break;
    sol = std::move(next);
    if (t + 1 == steps && !sol.optimal()) {
      if (sol.status == SolveStatus::kNumericalFailure) {
        trace.numerical_failure = true;
      } else {
        trace.infeasible_step = steps;
      }
    }
  }
  return trace;
}

SimulationTrace simulate_rollout(const UncertainSystem& sys, const MPCConfig& cfg,
                                 const VectorXd& x0, int steps,
                                 const UncertaintyRealization& realization,
                                 const SimulationOptions& options) {
  check_realization(realization, steps);
  SimulationTrace trace;
  trace.states.push_back(x0);
  if (sys.X.margin(x0) < -options.margin_tol) ++trace.state_violations;
  const MPCSolution sol = adaptive_solve(sys, cfg, x0);
  if (!sol.optimal()) {
    if (sol.status == SolveStatus::kNumericalFailure) {
      trace.numerical_failure = true;
    } else {
      trace.infeasible_step = 0;
    }
    return trace;
  }
  double solve_time = 0.0;
  for (const HorizonResult& hr : sol.per_horizon) solve_time += hr.solve_time;
  const RolloutPolicy policy(sys, sol, cfg.terminal.K);
  for (int t = 0; t < steps; ++t) {
    const VectorXd u = policy.input(t, trace.states, trace.inputs);
    StepRecord rec;
    rec.N_star = sol.N_star;
    rec.J_star = t == 0 ? sol.J_star : kNaN;
    rec.solve_time = t == 0 ? solve_time : 0.0;
    rec.iss_gap = kNaN;
    rec.iss_tol = kNaN;
    const VectorXd& x = trace.states.back();
    record_margins(sys, x, u, options.margin_tol, rec, trace);
    const VectorXd xn = step_true(sys, realization, x, u, t);
    trace.w_tilde.push_back(reconstruct_disturbance(sys, x, u, xn));
    trace.inputs.push_back(u);
    trace.states.push_back(xn);
    if (sys.X.margin(xn) < -options.margin_tol) ++trace.state_violations;
    trace.steps.push_back(rec);
    if (trace.state_violations > 0 || trace.input_violations > 0) break;
  }
  return trace;
}

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min(jobs, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<VectorXd> state_grid(const Polytope& X, int grid_n) {
  if (grid_n < 1) throw Error(ErrorCode::kInvalidProblem, "grid size must be >= 1");
  const auto [lo, hi] = X.bounding_box();
  const Index d = X.dim();
  std::vector<VectorXd> out;
  std::vector<int> idx(static_cast<size_t>(d), 0);
  while (true) {
    VectorXd x(d);
    for (Index i = 0; i < d; ++i) {
      const double s = grid_n == 1 ? 0.5 : static_cast<double>(idx[static_cast<size_t>(i)]) /
                                               static_cast<double>(grid_n - 1);
      x[i] = lo[i] + s * (hi[i] - lo[i]);
    }
    if (X.contains(x, 1e-12)) out.push_back(x);
    Index i = 0;
    while (i < d && ++idx[static_cast<size_t>(i)] == grid_n) idx[static_cast<size_t>(i++)] = 0;
    if (i == d) break;
  }
  return out;
}

int ROAEstimate::num_feasible() const {
  return static_cast<int>(std::count(feasible_mask.begin(), feasible_mask.end(), true));
}

namespace {

ROAEstimate roa_from(const std::vector<VectorXd>& grid, int jobs,
                     const std::function<MPCSolution(const VectorXd&)>& solve) {
  ROAEstimate roa;
  roa.grid = grid;
  const int n = static_cast<int>(grid.size());
  std::vector<int> status(static_cast<size_t>(n), 0), horizon(static_cast<size_t>(n), 0);
  parallel_for(n, jobs, [&](int i) {
    const MPCSolution sol = solve(grid[static_cast<size_t>(i)]);
    status[static_cast<size_t>(i)] = static_cast<int>(sol.status);
    horizon[static_cast<size_t>(i)] = sol.optimal() ? sol.N_star : 0;
  });
  std::vector<Eigen::Vector2d> feasible_points;
  for (int i = 0; i < n; ++i) {
    const auto s = static_cast<SolveStatus>(status[static_cast<size_t>(i)]);
    roa.feasible_mask.push_back(s == SolveStatus::kOptimal);
    roa.N_star.push_back(horizon[static_cast<size_t>(i)]);
    if (s == SolveStatus::kNumericalFailure) ++roa.numerical_failures;
    if (s == SolveStatus::kOptimal && grid[static_cast<size_t>(i)].size() == 2) {
      feasible_points.emplace_back(grid[static_cast<size_t>(i)]);
    }
  }
  if (!grid.empty() && grid.front().size() == 2) {
    roa.hull = hull_2d(feasible_points);
    roa.area = roa.hull->area;
  }
  return roa;
}

}  // namespace

ROAEstimate estimate_roa(const UncertainSystem& sys, const MPCConfig& cfg, int grid_n,
                         int jobs) {
  return roa_from(state_grid(sys.X, grid_n), jobs,
                  [&](const VectorXd& x) { return adaptive_solve(sys, cfg, x); });
}

ROAEstimate estimate_roa(const UncertainSystem& sys, const BaselineConfig& cfg, int grid_n,
                         int jobs) {
  return roa_from(state_grid(sys.X, grid_n), jobs,
                  [&](const VectorXd& x) { return baseline_solve(sys, cfg, x); });
}

std::vector<BenchmarkRow> benchmark(const UncertainSystem& sys, const MPCConfig& cfg,
                                    int first_horizon, int last_horizon, int reps,
                                    const std::vector<VectorXd>& states) {
  if (first_horizon < 1 || last_horizon < first_horizon) {
    throw Error(ErrorCode::kInvalidProblem, "benchmark: invalid horizon range");
  }
  if (reps < 1 || states.empty()) {
    throw Error(ErrorCode::kInvalidProblem, "benchmark: need reps >= 1 and states");
  }
  MPCConfig wide = cfg;
  wide.N = std::max(cfg.N, last_horizon);
  auto run = [&](int N, const VectorXd& x) {
    const auto start = std::chrono::steady_clock::now();
    const HorizonProblem hp = N == 1 ? build_case1(sys, wide, x) : build_caseN(sys, wide, x, N);
    const SolveOutcome out = solve_qp(hp.qp);
    return std::make_pair(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(),
        out.optimal());
  };
  for (int N = first_horizon; N <= last_horizon; ++N) {
    for (const VectorXd& x : states) run(N, x);
  }
  std::vector<BenchmarkRow> rows;
  for (int N = first_horizon; N <= last_horizon; ++N) {
    std::vector<double> times;
    BenchmarkRow row;
    row.horizon = N;
    for (int r = 0; r < reps; ++r) {
      for (const VectorXd& x : states) {
        const auto [dt, ok] = run(N, x);
        times.push_back(dt);
        row.optimal += ok ? 1 : 0;
      }
    }
    row.samples = static_cast<int>(times.size());
    double sum = 0.0;
    for (double t : times) sum += t;
    row.mean = sum / static_cast<double>(times.size());
    std::sort(times.begin(), times.end());
    const size_t n = times.size();
    row.median = n % 2 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
    row.min = times.front();
    row.max = times.back();
    rows.push_back(row);
  }
  return rows;
}

std::vector<VectorXd> benchmark_states(const UncertainSystem& sys, const MPCConfig& cfg,
                                       int grid_n) {
  std::vector<VectorXd> out;
  for (const VectorXd& x : state_grid(sys.X, grid_n)) {
    const MPCSolution sol = adaptive_solve(sys, cfg, x);
    bool all = sol.optimal();
    for (const HorizonResult& hr : sol.per_horizon) all = all && hr.status == SolveStatus::kOptimal;
    if (all) out.push_back(x);
  }
  if (out.empty()) out.push_back(VectorXd::Zero(sys.state_dim()));
  return out;
}

}  // namespace rmpc
