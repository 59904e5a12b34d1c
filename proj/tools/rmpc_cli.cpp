#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmpc/baseline.hpp"
#include "rmpc/controller.hpp"
#include "rmpc/error.hpp"
#include "rmpc/problem.hpp"
#include "rmpc/report.hpp"
#include "rmpc/simulator.hpp"

namespace {

using Eigen::VectorXd;
using nlohmann::json;
using namespace rmpc;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSynthesis = 3;
constexpr int kExitNumerical = 4;

struct Options {
  std::string problem;
  std::string x0;
  int steps = -1;
  long long seed = -1;
  int grid = 10;
  std::string horizons;
  int reps = 30;
  int jobs = 0;
  std::string out;
  std::string svg;
  bool baseline = false;
  bool timing = false;
  std::string mode = "uniform";
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidProblem:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kUnboundedConstraintSet:
    case ErrorCode::kHistoryLengthMismatch:
      return kExitValidation;
    case ErrorCode::kVertexUnstable:
    case ErrorCode::kEmptyTerminalSet:
    case ErrorCode::kLyapunovDivergence:
    case ErrorCode::kNoConvergence:
    case ErrorCode::kEmptyPolytope:
      return kExitSynthesis;
    case ErrorCode::kUnbounded:
    case ErrorCode::kAllHorizonsInfeasible:
    case ErrorCode::kNumericalFailure:
      return kExitNumerical;
  }
  return kExitNumerical;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidProblem, path + ": cannot open file");
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

VectorXd parse_vector(const std::string& text, Eigen::Index dim) {
  std::vector<double> values;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    try {
      size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw UsageError("--x0: '" + item + "' is not a number");
    }
  }
  if (static_cast<Eigen::Index>(values.size()) != dim) {
    throw UsageError("--x0: expected " + std::to_string(dim) + " values, got " +
                     std::to_string(values.size()));
  }
  return Eigen::Map<VectorXd>(values.data(), dim);
}

std::pair<int, int> parse_range(const std::string& text, int fallback_last) {
  if (text.empty()) return {1, fallback_last};
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int n = std::stoi(text);
      return {n, n};
    }
    const int a = std::stoi(text.substr(0, dots));
    const int b = std::stoi(text.substr(dots + 2));
    if (a < 1 || b < a) throw std::invalid_argument("");
    return {a, b};
  } catch (const std::exception&) {
    throw UsageError("--horizons: expected a..b with 1 <= a <= b, got '" + text + "'");
  }
}

class Session {
 public:
  Session(std::string command, const Options& opt) : command_(std::move(command)), opt_(opt) {
    bytes_ = read_file(opt.problem);
    problem_ = parse_problem(bytes_);
    seed_ = opt.seed >= 0 ? static_cast<std::uint64_t>(opt.seed) : problem_.seed;
    steps_ = opt.steps >= 0 ? opt.steps : problem_.steps;
    jobs_ = opt.jobs > 0 ? opt.jobs
                         : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
    if (opt.mode != "uniform" && opt.mode != "adversarial" && opt.mode != "zero") {
      throw UsageError("--mode: expected uniform, adversarial or zero");
    }
  }

  const Problem& problem() const { return problem_; }
  std::uint64_t seed() const { return seed_; }
  int steps() const { return steps_; }
  int jobs() const { return jobs_; }
  SamplingMode mode() const {
    return opt_.mode == "adversarial" ? SamplingMode::kAdversarial : SamplingMode::kUniform;
  }

  // Flags that change results; output paths and --jobs do not.
  RunManifest manifest(const std::string& flags) const {
    RunManifest m;
    m.command = flags.empty() ? command_ : command_ + " " + flags;
    m.problem_path = opt_.problem;
    m.seed = seed_;
    m.config_hash = config_hash(bytes_, m.command);
    m.timestamp = manifest_timestamp(opt_.problem);
    return m;
  }

  const MPCConfig& config() {
    if (!cfg_) {
      TerminalOptions t;
      t.seed = seed_;
      cfg_ = make_config(problem_, t);
    }
    return *cfg_;
  }

 private:
  std::string command_;
  Options opt_;
  std::string bytes_;
  Problem problem_;
  std::uint64_t seed_ = 0;
  int steps_ = 0;
  int jobs_ = 1;
  std::optional<MPCConfig> cfg_;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError(path + ": cannot write");
  out << text;
}

std::vector<Eigen::Vector2d> as_2d(const std::vector<VectorXd>& pts) {
  std::vector<Eigen::Vector2d> out;
  for (const VectorXd& p : pts) out.emplace_back(p[0], p[1]);
  return out;
}

std::pair<Eigen::Vector2d, Eigen::Vector2d> view_box(const Polytope& X) {
  const auto [lo, hi] = X.bounding_box();
  const Eigen::Vector2d pad = 0.05 * (hi - lo).head<2>();
  return {lo.head<2>() - pad, hi.head<2>() + pad};
}

int cmd_terminal_set(Session& s, const Options& opt) {
  const MPCConfig& cfg = s.config();
  const RunManifest m = s.manifest("");
  json report = terminal_report(s.problem().sys, cfg);
  report["manifest"] = m.to_json();
  emit(opt.out, report.dump(2) + "\n");
  std::cerr << "terminal set: " << cfg.terminal.X_N.num_facets()
            << " facets, Lyapunov residual " << cfg.terminal.lyapunov_residual << '\n';
  if (!opt.svg.empty()) {
    if (s.problem().sys.state_dim() != 2) {
      std::cerr << "warning: --svg needs a 2-D state; skipped\n";
      return kExitOk;
    }
    const auto [lo, hi] = view_box(s.problem().sys.X);
    std::ostringstream svg;
    write_svg(svg, "terminal set", lo, hi,
              {{"X", "#999999", vertices_2d(s.problem().sys.X)},
               {"X_N", "#1f77b4", vertices_2d(cfg.terminal.X_N)}},
              {}, m);
    emit(opt.svg, svg.str());
  }
  return kExitOk;
}

int write_trace(const SimulationTrace& trace, Eigen::Index m_dim, const RunManifest& m,
                const Options& opt) {
  std::ostringstream csv;
  write_trace_csv(csv, trace, m_dim, m, opt.timing);
  emit(opt.out, csv.str());
  const json summary = trace_summary(trace);
  std::cerr << summary.dump() << '\n';
  return trace.numerical_failure ? kExitNumerical : kExitOk;
}

std::string trajectory_flags(const Session& s, const VectorXd& x0, const Options& opt) {
  std::ostringstream f;
  f << "--x0 ";
  for (Eigen::Index i = 0; i < x0.size(); ++i) f << (i ? "," : "") << x0[i];
  f << " --steps " << s.steps() << " --seed " << s.seed() << " --mode " << opt.mode;
  if (opt.timing) f << " --timing";
  return f.str();
}

int cmd_simulate(Session& s, const Options& opt, bool rollout) {
  if (opt.x0.empty()) throw UsageError("--x0 is required");
  const VectorXd x0 = parse_vector(opt.x0, s.problem().sys.state_dim());
  if (s.steps() < 1) throw UsageError("--steps must be positive");
  const UncertaintyRealization r =
      opt.mode == "zero" ? zero_realization(s.problem().sys, s.steps())
                         : sample_realization(s.problem().sys, s.steps(), s.seed(), s.mode());
  const MPCConfig& cfg = s.config();
  const SimulationTrace trace =
      rollout ? simulate_rollout(s.problem().sys, cfg, x0, s.steps(), r)
              : simulate_closed_loop(s.problem().sys, cfg, x0, s.steps(), r);
  return write_trace(trace, s.problem().sys.input_dim(), s.manifest(trajectory_flags(s, x0, opt)), opt);
}

int cmd_roa(Session& s, const Options& opt) {
  if (opt.grid < 2) throw UsageError("--grid must be at least 2");
  const UncertainSystem& sys = s.problem().sys;
  const MPCConfig& cfg = s.config();
  const bool planar = sys.state_dim() == 2;
  if (!planar) {
    std::cerr << "warning: state dimension " << sys.state_dim()
              << " is not 2; reporting the feasibility mask only\n";
  }
  const RunManifest m =
      s.manifest("--grid " + std::to_string(opt.grid) + (opt.baseline ? " --baseline" : ""));
  const ROAEstimate roa = estimate_roa(sys, cfg, opt.grid, s.jobs());
  json report = {{"manifest", m.to_json()}, {"proposed", roa_report(roa, "proposed")}};
  if (!planar) report["proposed"].erase("hull");

  std::optional<ROAEstimate> lump;
  std::optional<BaselineConfig> base;
  if (opt.baseline) {
    try {
      base = make_baseline(sys, cfg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyTerminalSet) throw;
      std::cerr << "baseline: " << e.what() << '\n';
    }
    if (base) {
      lump = estimate_roa(sys, *base, opt.grid, s.jobs());
    } else {
      ROAEstimate empty;
      empty.grid = roa.grid;
      empty.feasible_mask.assign(roa.grid.size(), false);
      empty.N_star.assign(roa.grid.size(), 0);
      lump = empty;
    }
    json b = roa_report(*lump, "baseline");
    b["terminal_set_empty"] = !base.has_value();
    if (base && planar) b["X_N_area"] = polygon_area(vertices_2d(base->X_N_lump));
    report["baseline"] = b;
    int outside = 0;
    for (size_t i = 0; i < roa.grid.size(); ++i) {
      if (lump->feasible_mask[i] && !roa.feasible_mask[i]) ++outside;
    }
    report["inclusion"] = {{"baseline_subset_of_proposed", outside == 0},
                           {"baseline_only_points", outside},
                           {"proposed_feasible", roa.num_feasible()},
                           {"baseline_feasible", lump->num_feasible()}};
  }
  if (planar) report["proposed"]["X_N_area"] = polygon_area(vertices_2d(cfg.terminal.X_N));
  emit(opt.out, report.dump(2) + "\n");
  std::cerr << "roa: " << roa.num_feasible() << "/" << roa.grid.size() << " feasible";
  if (lump) std::cerr << ", baseline " << lump->num_feasible();
  std::cerr << '\n';

  if (!opt.svg.empty() && planar) {
    std::vector<SvgPolygon> polys = {{"X", "#999999", vertices_2d(sys.X)},
                                     {"X_N", "#1f77b4", vertices_2d(cfg.terminal.X_N)}};
    if (base) polys.push_back({"X_N lumped", "#ff7f0e", vertices_2d(base->X_N_lump)});
    if (roa.hull) polys.push_back({"ROA hull (proposed)", "#2ca02c", roa.hull->hull, false});
    if (lump && lump->hull && lump->hull->hull.size() >= 3) {
      polys.push_back({"ROA hull (baseline)", "#d62728", lump->hull->hull, false});
    }
    std::vector<VectorXd> both, only, none;
    for (size_t i = 0; i < roa.grid.size(); ++i) {
      if (lump && lump->feasible_mask[i]) {
        both.push_back(roa.grid[i]);
      } else if (roa.feasible_mask[i]) {
        only.push_back(roa.grid[i]);
      } else {
        none.push_back(roa.grid[i]);
      }
    }
    std::vector<SvgPoints> points;
    if (lump) points.push_back({"feasible (both)", "#9467bd", as_2d(both)});
    points.push_back({lump ? "feasible (proposed only)" : "feasible", "#2ca02c", as_2d(only)});
    points.push_back({"infeasible", "#444444", as_2d(none)});
    const auto [lo, hi] = view_box(sys.X);
    std::ostringstream svg;
    write_svg(svg, "region of attraction", lo, hi, polys, points, m);
    emit(opt.svg, svg.str());
  }
  return roa.numerical_failures > 0 ? kExitNumerical : kExitOk;
}

int cmd_bench(Session& s, const Options& opt) {
  const auto [first, last] = parse_range(opt.horizons, s.problem().N);
  if (opt.reps < 1) throw UsageError("--reps must be positive");
  const MPCConfig& cfg = s.config();
  MPCConfig widened = cfg;
  widened.N = std::max(cfg.N, last);
  const auto states = benchmark_states(s.problem().sys, widened, opt.grid);
  const auto rows = benchmark(s.problem().sys, cfg, first, last, opt.reps, states);
  const RunManifest m = s.manifest("--horizons " + std::to_string(first) + ".." +
                                   std::to_string(last) + " --reps " +
                                   std::to_string(opt.reps) + " --grid " +
                                   std::to_string(opt.grid));
  json report = benchmark_report(rows, static_cast<int>(states.size()), opt.reps);
  report["manifest"] = m.to_json();
  emit(opt.out, report.dump(2) + "\n");
  for (const BenchmarkRow& r : rows) {
    std::cerr << "N=" << r.horizon << " median " << r.median << " s\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive-horizon robust MPC toolkit"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--problem", opt.problem, "problem JSON file")->required();
    sub->add_option("--out", opt.out, "output file (stdout when omitted)");
    sub->add_option("--jobs", opt.jobs, "worker threads (default: all cores)");
  };
  auto add_trajectory = [&](CLI::App* sub) {
    sub->add_option("--x0", opt.x0, "initial state, comma separated")->required();
    sub->add_option("--steps", opt.steps, "number of steps (default from problem)");
    sub->add_option("--seed", opt.seed, "realization seed (default from problem)");
    sub->add_option("--mode", opt.mode, "uncertainty sampling: uniform, adversarial or zero");
    sub->add_flag("--timing", opt.timing, "record solve times in the trace");
  };

  CLI::App* terminal = app.add_subcommand("terminal-set", "synthesize K-invariant X_N and P_N");
  add_common(terminal);
  terminal->add_option("--seed", opt.seed, "seed for the hull stability screen");
  terminal->add_option("--svg", opt.svg, "write a picture of X and X_N");

  CLI::App* simulate = app.add_subcommand("simulate", "closed-loop simulation to CSV");
  add_common(simulate);
  add_trajectory(simulate);

  CLI::App* rollout = app.add_subcommand("rollout", "roll-out policy without re-solving");
  add_common(rollout);
  add_trajectory(rollout);

  CLI::App* roa = app.add_subcommand("roa", "grid feasibility estimate of the ROA");
  add_common(roa);
  roa->add_option("--grid", opt.grid, "points per axis");
  roa->add_option("--svg", opt.svg, "write sets and grid as SVG");
  roa->add_flag("--baseline", opt.baseline, "also evaluate the lumped baseline");
  roa->add_option("--seed", opt.seed, "seed for the hull stability screen");

  CLI::App* bench = app.add_subcommand("bench", "per-horizon solve times");
  add_common(bench);
  bench->add_option("--horizons", opt.horizons, "range a..b (default 1..N)");
  bench->add_option("--reps", opt.reps, "repetitions per state and horizon");
  bench->add_option("--grid", opt.grid, "grid used to pick benchmark states");
  bench->add_option("--seed", opt.seed, "seed for the hull stability screen");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    CLI::App* chosen = app.get_subcommands().front();
    Session s(chosen->get_name(), opt);
    if (chosen == terminal) return cmd_terminal_set(s, opt);
    if (chosen == simulate) return cmd_simulate(s, opt, false);
    if (chosen == rollout) return cmd_simulate(s, opt, true);
    if (chosen == roa) return cmd_roa(s, opt);
    return cmd_bench(s, opt);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
