#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rmpc/controller.hpp"
#include "rmpc/simulator.hpp"

namespace rmpc {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
  std::string command;
  std::string problem_path;
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
  std::string config_hash;  // 16 hex digits
  std::string timestamp;    // ISO-8601 UTC

  nlohmann::json to_json() const;
};

/// Timestamp from SOURCE_DATE_EPOCH when set, else the problem file's
/// modification time, so repeated runs embed identical manifests.
std::string manifest_timestamp(const std::filesystem::path& problem_path);

/// FNV-1a over the problem file bytes followed by the canonical flag string.
std::string config_hash(const std::string& problem_bytes, const std::string& flags);

nlohmann::json to_json(const Eigen::MatrixXd& m);
nlohmann::json to_json(const Eigen::VectorXd& v);
nlohmann::json to_json(const Polytope& P);

/// One "# key: value" header block, a column row, and one row per step;
/// the final state gets a row with empty input columns. Solve times are
/// written only when with_timing is set.
void write_trace_csv(std::ostream& out, const SimulationTrace& trace, Eigen::Index input_dim,
                     const RunManifest& manifest, bool with_timing);

nlohmann::json trace_summary(const SimulationTrace& trace);

nlohmann::json solution_report(const MPCSolution& sol, const std::string& tag);

nlohmann::json terminal_report(const UncertainSystem& sys, const MPCConfig& cfg);

nlohmann::json roa_report(const ROAEstimate& roa, const std::string& tag);

/// Published reference timings (seconds, horizons 1..5), context only.
std::vector<double> reference_timings();

nlohmann::json benchmark_report(const std::vector<BenchmarkRow>& rows, int num_states,
                                int reps);

struct SvgPolygon {
  std::string label;
  std::string color;
  std::vector<Eigen::Vector2d> vertices;
  bool filled = true;
};

struct SvgPoints {
  std::string label;
  std::string color;
  std::vector<Eigen::Vector2d> points;
};

/// Standalone SVG with an axis-aligned view box covering [lo, hi], filled
/// polygons, point markers, and a legend. The manifest goes in a metadata element.
void write_svg(std::ostream& out, const std::string& title, const Eigen::Vector2d& lo,
               const Eigen::Vector2d& hi, const std::vector<SvgPolygon>& polygons,
               const std::vector<SvgPoints>& points, const RunManifest& manifest);

}  // namespace rmpc
