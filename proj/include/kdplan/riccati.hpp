#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

namespace kdplan {

// Local linear-quadratic model of one stage, in deviation coordinates
// (dx, du) about a nominal trajectory:
//   dx+ = A dx + B du
//   cost ~ l_x' dx + l_u' du + 1/2 dx' l_xx dx + 1/2 du' l_uu du + du' l_ux dx
struct LqStage {
  Eigen::MatrixXd A, B;
  Eigen::VectorXd l_x, l_u;
  Eigen::MatrixXd l_xx, l_uu, l_ux;
};

struct LqTerminal {
  Eigen::VectorXd l_x;
  Eigen::MatrixXd l_xx;
};

struct BackwardPassResult {
  std::vector<Eigen::VectorXd> k;  // feedforward
  std::vector<Eigen::MatrixXd> K;  // feedback
  std::vector<Eigen::VectorXd> V_x;   // value gradient at stages 0..N
  std::vector<Eigen::MatrixXd> V_xx;  // value Hessian at stages 0..N
  // Predicted cost change of a full step is alpha * d1 + alpha^2 * d2.
  double d1 = 0.0;
  double d2 = 0.0;
};

// Regularized backward Riccati recursion (regularization mu added to the
// value Hessian where it enters Q_uu and Q_ux). Returns nullopt when some
// Q_uu is not positive definite.
std::optional<BackwardPassResult> riccati_backward_pass(std::span<const LqStage> stages,
                                                        const LqTerminal& terminal,
                                                        double mu);

}  // namespace kdplan
