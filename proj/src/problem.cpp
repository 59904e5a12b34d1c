#include "rmpc/problem.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "rmpc/error.hpp"

namespace rmpc {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::kInvalidProblem, path + ": " + msg);
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "non-finite value");
  return v;
}

VectorXd vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  VectorXd v(static_cast<Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Index>(i)] = number(j[i], path + "[" + std::to_string(i) + "]");
  }
  return v;
}

MatrixXd matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const size_t rows = j.size();
  size_t cols = 0;
  for (size_t i = 0; i < rows; ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_array()) fail(rp, "expected a row array");
    if (i == 0) cols = j[i].size();
    if (j[i].size() != cols || cols == 0) {
      fail(rp, "expected " + std::to_string(cols) + " entries, got " +
                   std::to_string(j[i].size()));
    }
  }
  MatrixXd m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (size_t i = 0; i < rows; ++i) {
    for (size_t k = 0; k < cols; ++k) {
      m(static_cast<Index>(i), static_cast<Index>(k)) =
          number(j[i][k], path + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
  }
  return m;
}

void expect_shape(const MatrixXd& m, Index rows, Index cols, const std::string& path) {
  if (m.rows() != rows || m.cols() != cols) {
    fail(path, "expected shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                   ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

Polytope polytope(const json& j, const std::string& path, Index dim) {
  if (!j.is_object()) fail(path, "expected {\"H\", \"h\"} or {\"box\"}");
  if (j.contains("box")) {
    const json& box = j["box"];
    const std::string bp = join(path, "box");
    if (!box.is_object()) fail(bp, "expected {\"lo\", \"hi\"}");
    const VectorXd lo = vector(field(box, "lo", bp), join(bp, "lo"));
    const VectorXd hi = vector(field(box, "hi", bp), join(bp, "hi"));
    if (lo.size() != dim) {
      fail(join(bp, "lo"), "expected " + std::to_string(dim) + " entries, got " +
                               std::to_string(lo.size()));
    }
    if (hi.size() != dim) {
      fail(join(bp, "hi"), "expected " + std::to_string(dim) + " entries, got " +
                               std::to_string(hi.size()));
    }
    if ((lo.array() > hi.array()).any()) fail(bp, "lo exceeds hi");
    return Polytope::box(lo, hi);
  }
  const MatrixXd H = matrix(field(j, "H", path), join(path, "H"));
  const VectorXd h = vector(field(j, "h", path), join(path, "h"));
  if (H.cols() != dim) {
    fail(join(path, "H"), "expected " + std::to_string(dim) + " columns, got " +
                              std::to_string(H.cols()));
  }
  if (h.size() != H.rows()) {
    fail(join(path, "h"), "expected " + std::to_string(H.rows()) + " entries, got " +
                              std::to_string(h.size()));
  }
  return Polytope(H, h);
}

void check_pd(const MatrixXd& m, const std::string& path) {
  if ((m - m.transpose()).lpNorm<Eigen::Infinity>() >
      1e-12 * (1.0 + m.lpNorm<Eigen::Infinity>())) {
    fail(path, "not symmetric");
  }
  if (Eigen::LLT<MatrixXd>(m).info() != Eigen::Success) {
    fail(path, "not positive definite");
  }
}

void check_set(const Polytope& P, Index dim, const std::string& path) {
  for (Index i = 0; i < dim; ++i) {
    for (double s : {1.0, -1.0}) {
      double value = 0.0;
      try {
        value = P.support(s * VectorXd::Unit(dim, i));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kUnbounded) {
          throw Error(ErrorCode::kUnboundedConstraintSet,
                      path + ": unbounded along coordinate " + std::to_string(i));
        }
        if (e.code() == ErrorCode::kEmptyPolytope) fail(path, "empty set");
        throw;
      }
      if (!(value > 0.0)) fail(path, "origin is not in the interior");
    }
  }
  if (!(P.margin(VectorXd::Zero(dim)) > 0.0)) fail(path, "origin is not in the interior");
}

const std::set<std::string> kKnownKeys = {
    "name",   "A_bar", "B_bar", "deltaA_vertices", "deltaB_vertices", "W", "X", "U",
    "cost",   "K",     "N",     "rng",             "reference_gain",  "description"};

}  // namespace

Problem parse_problem(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("<root>", std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) fail("<root>", "expected an object");
  for (const auto& [key, value] : root.items()) {
    if (!kKnownKeys.count(key)) fail(key, "unknown key");
  }

  Problem p;
  if (root.contains("name")) {
    if (!root["name"].is_string()) fail("name", "expected a string");
    p.name = root["name"].get<std::string>();
  }
  UncertainSystem& sys = p.sys;
  sys.A_bar = matrix(field(root, "A_bar", ""), "A_bar");
  const Index d = sys.A_bar.rows();
  expect_shape(sys.A_bar, d, d, "A_bar");
  sys.B_bar = matrix(field(root, "B_bar", ""), "B_bar");
  if (sys.B_bar.rows() != d) {
    fail("B_bar", "expected " + std::to_string(d) + " rows, got " +
                      std::to_string(sys.B_bar.rows()));
  }
  const Index m = sys.B_bar.cols();

  for (const auto& [key, out, cols] :
       {std::tuple{std::string("deltaA_vertices"), &sys.deltaA_vertices, d},
        std::tuple{std::string("deltaB_vertices"), &sys.deltaB_vertices, m}}) {
    const json& list = field(root, key, "");
    if (!list.is_array() || list.empty()) fail(key, "expected a non-empty list of matrices");
    for (size_t i = 0; i < list.size(); ++i) {
      const std::string ip = key + "[" + std::to_string(i) + "]";
      out->push_back(matrix(list[i], ip));
      expect_shape(out->back(), d, cols, ip);
    }
  }

  sys.W = polytope(field(root, "W", ""), "W", d);
  sys.X = polytope(field(root, "X", ""), "X", d);
  sys.U = polytope(field(root, "U", ""), "U", m);
  check_set(sys.X, d, "X");
  check_set(sys.U, m, "U");
  check_set(sys.W, d, "W");

  const json& cost = field(root, "cost", "");
  if (!cost.is_object()) fail("cost", "expected {\"P\", \"R\"}");
  p.P = matrix(field(cost, "P", "cost"), "cost.P");
  expect_shape(p.P, d, d, "cost.P");
  check_pd(p.P, "cost.P");
  p.R = matrix(field(cost, "R", "cost"), "cost.R");
  expect_shape(p.R, m, m, "cost.R");
  check_pd(p.R, "cost.R");

  p.K = matrix(field(root, "K", ""), "K");
  expect_shape(p.K, m, d, "K");

  const json& N = field(root, "N", "");
  if (!N.is_number_integer() || N.get<long long>() < 1 || N.get<long long>() > 50) {
    fail("N", "expected an integer in [1, 50]");
  }
  p.N = N.get<int>();

  if (root.contains("rng")) {
    const json& rng = root["rng"];
    if (!rng.is_object()) fail("rng", "expected an object");
    for (const auto& [key, value] : rng.items()) {
      if (key != "seed" && key != "steps") fail("rng." + key, "unknown key");
    }
    if (rng.contains("seed")) {
      if (!rng["seed"].is_number_unsigned()) fail("rng.seed", "expected a nonnegative integer");
      p.seed = rng["seed"].get<std::uint64_t>();
    }
    if (rng.contains("steps")) {
      if (!rng["steps"].is_number_integer() || rng["steps"].get<long long>() < 1) {
        fail("rng.steps", "expected a positive integer");
      }
      p.steps = rng["steps"].get<int>();
    }
  }
  if (root.contains("reference_gain")) {
    p.reference_gain = matrix(root["reference_gain"], "reference_gain");
    expect_shape(*p.reference_gain, m, d, "reference_gain");
  }
  sys.validate();
  return p;
}

Problem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path.string(), "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_problem(buffer.str());
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace rmpc
