#include "rmpc/prediction.hpp"

#include <string>

#include "rmpc/error.hpp"

namespace rmpc {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

StackedDynamics build_stacked(const MatrixXd& A_bar, const MatrixXd& B_bar, int horizon) {
  if (horizon < 1) {
    throw Error(ErrorCode::kInvalidProblem, "build_stacked: horizon must be >= 1");
  }
  const Index d = A_bar.rows();
  const Index m = B_bar.cols();
  if (A_bar.cols() != d || B_bar.rows() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "build_stacked: A_bar/B_bar shapes");
  }
  const Index N = horizon;
  StackedDynamics s;
  s.horizon = horizon;
  s.A_stack.resize(d * N, d);
  s.G = MatrixXd::Zero(d * N, d * N);
  std::vector<MatrixXd> powers{MatrixXd::Identity(d, d)};
  for (Index k = 1; k <= N; ++k) powers.push_back(A_bar * powers.back());
  for (Index i = 0; i < N; ++i) {
    s.A_stack.middleRows(i * d, d) = powers[static_cast<size_t>(i + 1)];
    for (Index j = 0; j <= i; ++j) {
      s.G.block(i * d, j * d, d, d) = powers[static_cast<size_t>(i - j)];
    }
  }
  s.C = MatrixXd::Zero(d * N, m * N);
  for (Index i = 0; i < N; ++i) {
    for (Index j = 0; j <= i; ++j) {
      s.C.block(i * d, j * m, d, m) = powers[static_cast<size_t>(i - j)] * B_bar;
    }
  }
  return s;
}

FeedbackGainStack::FeedbackGainStack(int horizon, Index m, Index d)
    : horizon_(horizon), m_(m), d_(d), dense_(MatrixXd::Zero(m * horizon, d * horizon)) {
  if (horizon < 1) {
    throw Error(ErrorCode::kInvalidProblem, "FeedbackGainStack: horizon must be >= 1");
  }
}

MatrixXd FeedbackGainStack::block(int k, int l) const {
  if (k < 0 || l < 0 || k >= horizon_ || l >= horizon_) {
    throw Error(ErrorCode::kDimensionMismatch, "FeedbackGainStack: block index out of range");
  }
  return dense_.block(k * m_, l * d_, m_, d_);
}

void FeedbackGainStack::set_block(int k, int l, const MatrixXd& value) {
  if (k < 0 || l < 0 || k >= horizon_ || l >= k) {
    throw Error(ErrorCode::kDimensionMismatch,
                "FeedbackGainStack: block (" + std::to_string(k) + ", " +
                    std::to_string(l) + ") is not strictly lower triangular");
  }
  if (value.rows() != m_ || value.cols() != d_) {
    throw Error(ErrorCode::kDimensionMismatch, "FeedbackGainStack: block shape");
  }
  dense_.block(k * m_, l * d_, m_, d_) = value;
}

MatrixXd FeedbackGainStack::dense() const { return dense_; }

FeedbackGainStack FeedbackGainStack::from_dense(const MatrixXd& M, int horizon, Index m,
                                                Index d) {
  if (M.rows() != m * horizon || M.cols() != d * horizon) {
    throw Error(ErrorCode::kDimensionMismatch, "FeedbackGainStack: dense shape");
  }
  FeedbackGainStack out(horizon, m, d);
  for (int k = 1; k < horizon; ++k) {
    for (int l = 0; l < k; ++l) out.set_block(k, l, M.block(k * m, l * d, m, d));
  }
  return out;
}

VectorXd policy_input(const FeedbackGainStack& M, const VectorXd& u_bar_stack, int k,
                      std::span<const VectorXd> history) {
  const Index m = M.input_dim();
  const Index d = M.state_dim();
  if (k < 0 || k >= M.horizon() || static_cast<int>(history.size()) != k) {
    throw Error(ErrorCode::kHistoryLengthMismatch,
                "policy_input: step " + std::to_string(k) + " needs " +
                    std::to_string(k) + " past disturbances, got " +
                    std::to_string(history.size()) + " (horizon " +
                    std::to_string(M.horizon()) + ")");
  }
  if (u_bar_stack.size() != m * M.horizon()) {
    throw Error(ErrorCode::kDimensionMismatch, "policy_input: u_bar stack size");
  }
  VectorXd u = u_bar_stack.segment(k * m, m);
  for (int l = 0; l < k; ++l) {
    if (history[static_cast<size_t>(l)].size() != d) {
      throw Error(ErrorCode::kDimensionMismatch, "policy_input: disturbance size");
    }
    u += M.block(k, l) * history[static_cast<size_t>(l)];
  }
  return u;
}

}  // namespace rmpc
