#include "rmpc/report.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <sstream>

#include <sys/stat.h>

#include "rmpc/error.hpp"
#include "rmpc/problem.hpp"

namespace rmpc {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

std::string iso8601(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

json RunManifest::to_json() const {
  return {{"command", command},           {"problem", problem_path},
          {"seed", seed},                 {"tool_version", tool_version},
          {"config_hash", config_hash},   {"timestamp", timestamp}};
}

std::string manifest_timestamp(const std::filesystem::path& problem_path) {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (end && *end == '\0') return iso8601(static_cast<std::time_t>(v));
  }
  struct stat st{};
  if (::stat(problem_path.c_str(), &st) != 0) return iso8601(0);
  return iso8601(st.st_mtime);
}

std::string config_hash(const std::string& problem_bytes, const std::string& flags) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0')
    << fnv1a64(problem_bytes + '\0' + flags);
  return s.str();
}

json to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const VectorXd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const Polytope& P) { return {{"H", to_json(P.H())}, {"h", to_json(P.h())}}; }

void write_trace_csv(std::ostream& out, const SimulationTrace& trace, Index input_dim,
                     const RunManifest& manifest, bool with_timing) {
  out << "# command: " << manifest.command << '\n'
      << "# problem: " << manifest.problem_path << '\n'
      << "# seed: " << manifest.seed << '\n'
      << "# tool_version: " << manifest.tool_version << '\n'
      << "# config_hash: " << manifest.config_hash << '\n'
      << "# timestamp: " << manifest.timestamp << '\n'
      << "# timing: "
      << (with_timing ? "seconds, QP construction and solve for all horizons, parsing excluded"
                      : "omitted (pass --timing to record)")
      << '\n'
      << "# infeasible_step: " << trace.infeasible_step << '\n'
      << "# numerical_failure: " << (trace.numerical_failure ? 1 : 0) << '\n'
      << "# state_violations: " << trace.state_violations << '\n'
      << "# input_violations: " << trace.input_violations << '\n'
      << "# iss_violations: " << trace.iss_violations << '\n';
  const Index d = trace.states.empty() ? 0 : trace.states.front().size();
  const Index m = input_dim;
  out << 't';
  for (Index i = 0; i < d; ++i) out << ",x" << i;
  for (Index i = 0; i < m; ++i) out << ",u" << i;
  for (Index i = 0; i < d; ++i) out << ",w" << i;
  out << ",N_star,J_star,margin,time,iss_gap\n";
  for (size_t t = 0; t < trace.states.size(); ++t) {
    out << t;
    for (Index i = 0; i < d; ++i) out << ',' << fmt(trace.states[t][i]);
    const bool has_step = t < trace.steps.size();
    for (Index i = 0; i < m; ++i) out << ',' << (has_step ? fmt(trace.inputs[t][i]) : "");
    for (Index i = 0; i < d; ++i) out << ',' << (has_step ? fmt(trace.w_tilde[t][i]) : "");
    if (has_step) {
      const StepRecord& r = trace.steps[t];
      out << ',' << r.N_star << ',' << fmt(r.J_star) << ',' << fmt(r.margin) << ','
          << (with_timing ? fmt(r.solve_time) : "") << ',' << fmt(r.iss_gap);
    } else {
      out << ",,,,,";
    }
    out << '\n';
  }
}

json trace_summary(const SimulationTrace& trace) {
  return {{"steps", trace.steps.size()},
          {"infeasible_step", trace.infeasible_step},
          {"numerical_failure", trace.numerical_failure},
          {"state_violations", trace.state_violations},
          {"input_violations", trace.input_violations},
          {"iss_checks", trace.iss_checks},
          {"iss_violations", trace.iss_violations},
          {"clean", trace.clean()}};
}

json solution_report(const MPCSolution& sol, const std::string& tag) {
  json per = json::array();
  for (const HorizonResult& hr : sol.per_horizon) {
    json row = {{"horizon", hr.horizon},
                {"status", std::string(to_string(hr.status))},
                {"cost", hr.status == SolveStatus::kOptimal ? json(hr.cost) : json(nullptr)},
                {"time", hr.solve_time}};
    if (hr.status == SolveStatus::kInfeasible) row["certificate_valid"] = hr.certificate_valid;
    per.push_back(row);
  }
  json out = {{"controller", tag},
              {"status", std::string(to_string(sol.status))},
              {"per_horizon", per}};
  if (sol.optimal()) {
    out["N_star"] = sol.N_star;
    out["J_star"] = sol.J_star;
    out["applied_input"] = to_json(VectorXd(sol.applied_input()));
  }
  return out;
}

json terminal_report(const UncertainSystem& sys, const MPCConfig& cfg) {
  const TerminalComponents& t = cfg.terminal;
  json out = {{"X_N", to_json(t.X_N)},
              {"P_N", to_json(t.P_N)},
              {"K", to_json(t.K)},
              {"screening",
               {{"max_vertex_spectral_radius", t.max_vertex_radius},
                {"max_sampled_spectral_radius", t.max_sampled_radius},
                {"nominal_spectral_radius", t.nominal_radius},
                {"hull_stability", "screened by sampling, not certified"}}},
              {"lyapunov_residual", t.lyapunov_residual},
              {"invariance_residual", t.invariance_residual},
              {"net_additive_bound",
               {{"w_tilde_max", cfg.bound.w_tilde_max},
                {"x_max", cfg.bound.x_max},
                {"u_max", cfg.bound.u_max},
                {"w_max", cfg.bound.w_max},
                {"dA_norm", cfg.bound.dA_norm},
                {"dB_norm", cfg.bound.dB_norm}}}};
  if (sys.state_dim() == 2) {
    out["X_N_area"] = polygon_area(vertices_2d(t.X_N));
  }
  return out;
}

json roa_report(const ROAEstimate& roa, const std::string& tag) {
  json points = json::array();
  for (size_t i = 0; i < roa.grid.size(); ++i) {
    points.push_back({{"x", to_json(roa.grid[i])},
                      {"feasible", static_cast<bool>(roa.feasible_mask[i])},
                      {"N_star", roa.N_star[i]}});
  }
  json out = {{"controller", tag},
              {"evaluations", roa.grid.size()},
              {"feasible", roa.num_feasible()},
              {"numerical_failures", roa.numerical_failures},
              {"points", points}};
  if (roa.hull) {
    json hull = json::array();
    for (const auto& v : roa.hull->hull) hull.push_back({v.x(), v.y()});
    out["hull"] = hull;
    out["area"] = roa.area;
  }
  return out;
}

std::vector<double> reference_timings() { return {0.0026, 0.0023, 0.0038, 0.0056, 0.0078}; }

json benchmark_report(const std::vector<BenchmarkRow>& rows, int num_states, int reps) {
  json table = json::array();
  const std::vector<double> ref = reference_timings();
  bool monotone = true;
  for (size_t i = 0; i < rows.size(); ++i) {
    const BenchmarkRow& r = rows[i];
    if (i > 0 && r.median < rows[i - 1].median) monotone = false;
    json row = {{"horizon", r.horizon},   {"samples", r.samples}, {"optimal", r.optimal},
                {"mean", r.mean},         {"median", r.median},   {"min", r.min},
                {"max", r.max}};
    if (r.horizon >= 1 && r.horizon <= static_cast<int>(ref.size())) {
      row["reference_seconds"] = ref[static_cast<size_t>(r.horizon - 1)];
    }
    table.push_back(row);
  }
  return {{"timing", "seconds per horizon problem, QP construction plus solve, warm cache, "
                     "problem parsing excluded"},
          {"reference_note", "reference_seconds are published figures from different "
                             "hardware and solver; context only"},
          {"states", num_states},
          {"reps", reps},
          {"median_nondecreasing", monotone},
          {"rows", table}};
}

void write_svg(std::ostream& out, const std::string& title, const Eigen::Vector2d& lo,
               const Eigen::Vector2d& hi, const std::vector<SvgPolygon>& polygons,
               const std::vector<SvgPoints>& points, const RunManifest& manifest) {
  const double width = 640.0, height = 640.0, pad = 40.0, legend = 24.0;
  const Eigen::Vector2d span = (hi - lo).cwiseMax(1e-12);
  auto px = [&](const Eigen::Vector2d& p) {
    return Eigen::Vector2d(pad + (p.x() - lo.x()) / span.x() * (width - 2 * pad),
                           pad + (hi.y() - p.y()) / span.y() * (height - 2 * pad));
  };
  const double total_h =
      height + legend * static_cast<double>(polygons.size() + points.size()) + 10.0;
  out << std::setprecision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << ' '
      << total_h << "\" width=\"" << width << "\" height=\"" << total_h << "\">\n";
  out << "<metadata>" << escape_xml(manifest.to_json().dump()) << "</metadata>\n";
  out << "<title>" << escape_xml(title) << "</title>\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << total_h
      << "\" fill=\"white\"/>\n";
  const Eigen::Vector2d a = px(lo), b = px(hi);
  out << "<rect x=\"" << a.x() << "\" y=\"" << b.y() << "\" width=\"" << b.x() - a.x()
      << "\" height=\"" << a.y() - b.y() << "\" fill=\"none\" stroke=\"#888\"/>\n";
  out << "<text x=\"" << a.x() << "\" y=\"" << a.y() + 16 << "\" font-size=\"11\">"
      << lo.x() << ", " << lo.y() << "</text>\n";
  out << "<text x=\"" << b.x() << "\" y=\"" << b.y() - 6
      << "\" font-size=\"11\" text-anchor=\"end\">" << hi.x() << ", " << hi.y() << "</text>\n";
  for (const SvgPolygon& poly : polygons) {
    out << "<polygon points=\"";
    for (const auto& v : poly.vertices) {
      const Eigen::Vector2d q = px(v);
      out << q.x() << ',' << q.y() << ' ';
    }
    out << "\" fill=\"" << (poly.filled ? poly.color : "none")
        << "\" fill-opacity=\"0.3\" stroke=\"" << poly.color << "\" stroke-width=\""
        << (poly.filled ? "1.5" : "2.5") << (poly.filled ? "" : "\" stroke-dasharray=\"6 4")
        << "\"><title>" << escape_xml(poly.label)
        << "</title></polygon>\n";
  }
  for (const SvgPoints& set : points) {
    for (const auto& p : set.points) {
      const Eigen::Vector2d q = px(p);
      out << "<circle cx=\"" << q.x() << "\" cy=\"" << q.y() << "\" r=\"3\" fill=\""
          << set.color << "\"/>\n";
    }
  }
  double y = height;
  auto legend_row = [&](const std::string& label, const std::string& color, bool dot) {
    if (dot) {
      out << "<circle cx=\"" << pad + 6 << "\" cy=\"" << y + 8 << "\" r=\"4\" fill=\"" << color
          << "\"/>\n";
    } else {
      out << "<rect x=\"" << pad << "\" y=\"" << y << "\" width=\"12\" height=\"12\" fill=\""
          << color << "\" fill-opacity=\"0.5\" stroke=\"" << color << "\"/>\n";
    }
    out << "<text x=\"" << pad + 20 << "\" y=\"" << y + 11 << "\" font-size=\"13\">"
        << escape_xml(label) << "</text>\n";
    y += legend;
  };
  for (const SvgPolygon& poly : polygons) legend_row(poly.label, poly.color, false);
  for (const SvgPoints& set : points) legend_row(set.label, set.color, true);
  out << "</svg>\n";
}

}  // namespace rmpc
