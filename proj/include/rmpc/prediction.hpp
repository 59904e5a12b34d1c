#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rmpc {

/// Predicted states [x_{t+1}; …; x_{t+N}] = A_stack x_t + C ū + G w̃.
struct StackedDynamics {
  int horizon = 0;
  Eigen::MatrixXd A_stack;  // [Ā; Ā²; …; Ā^N]
  Eigen::MatrixXd C;        // G (I_N ⊗ B̄)
  Eigen::MatrixXd G;        // I + Σ_k L^k ⊗ Ā^k
};

StackedDynamics build_stacked(const Eigen::MatrixXd& A_bar,
                              const Eigen::MatrixXd& B_bar, int horizon);

/// Strictly block-lower-triangular disturbance-feedback gains M_{k,l}
/// (0 ≤ l < k < N), each m×d.
class FeedbackGainStack {
 public:
  FeedbackGainStack() = default;
  FeedbackGainStack(int horizon, Eigen::Index m, Eigen::Index d);

  int horizon() const { return horizon_; }
  Eigen::Index input_dim() const { return m_; }
  Eigen::Index state_dim() const { return d_; }

  /// Zero block for l ≥ k.
  Eigen::MatrixXd block(int k, int l) const;
  /// Throws Error(kDimensionMismatch) for l ≥ k or a wrong shape.
  void set_block(int k, int l, const Eigen::MatrixXd& value);

  /// (m·N) × (d·N) matrix.
  Eigen::MatrixXd dense() const;
  static FeedbackGainStack from_dense(const Eigen::MatrixXd& M, int horizon,
                                      Eigen::Index m, Eigen::Index d);

 private:
  int horizon_ = 0;
  Eigen::Index m_ = 0;
  Eigen::Index d_ = 0;
  Eigen::MatrixXd dense_;
};

/// u_k = Σ_{l<k} M_{k,l} w̃_l + ū_k where history holds w̃_0 … w̃_{k−1}.
/// Throws Error(kHistoryLengthMismatch) unless history.size() == k < N.
Eigen::VectorXd policy_input(const FeedbackGainStack& M,
                             const Eigen::VectorXd& u_bar_stack, int k,
                             std::span<const Eigen::VectorXd> history);

}  // namespace rmpc
