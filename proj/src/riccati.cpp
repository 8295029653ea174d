#include "kdplan/riccati.hpp"

#include <Eigen/Cholesky>

namespace kdplan {

std::optional<BackwardPassResult> riccati_backward_pass(std::span<const LqStage> stages,
                                                        const LqTerminal& terminal,
                                                        double mu) {
  const std::size_t n_steps = stages.size();
  BackwardPassResult out;
  out.k.resize(n_steps);
  out.K.resize(n_steps);
  out.V_x.resize(n_steps + 1);
  out.V_xx.resize(n_steps + 1);

  Eigen::VectorXd V_x = terminal.l_x;
  Eigen::MatrixXd V_xx = terminal.l_xx;
  out.V_x[n_steps] = V_x;
  out.V_xx[n_steps] = V_xx;

  for (std::size_t i = n_steps; i-- > 0;) {
    const LqStage& s = stages[i];
    const Eigen::MatrixXd V_reg =
        V_xx + mu * Eigen::MatrixXd::Identity(V_xx.rows(), V_xx.cols());

    const Eigen::VectorXd Q_x = s.l_x + s.A.transpose() * V_x;
    const Eigen::VectorXd Q_u = s.l_u + s.B.transpose() * V_x;
    const Eigen::MatrixXd Q_xx = s.l_xx + s.A.transpose() * V_xx * s.A;
    Eigen::MatrixXd Q_uu = s.l_uu + s.B.transpose() * V_reg * s.B;
    Q_uu = 0.5 * (Q_uu + Q_uu.transpose()).eval();
    const Eigen::MatrixXd Q_ux = s.l_ux + s.B.transpose() * V_reg * s.A;

    const Eigen::LLT<Eigen::MatrixXd> llt(Q_uu);
    if (llt.info() != Eigen::Success) return std::nullopt;

    const Eigen::VectorXd k = -llt.solve(Q_u);
    const Eigen::MatrixXd K = -llt.solve(Q_ux);

    out.d1 += k.dot(Q_u);
    out.d2 += 0.5 * k.dot(Q_uu * k);

    V_x = Q_x + K.transpose() * Q_uu * k + K.transpose() * Q_u + Q_ux.transpose() * k;
    V_xx = Q_xx + K.transpose() * Q_uu * K + K.transpose() * Q_ux + Q_ux.transpose() * K;
    V_xx = 0.5 * (V_xx + V_xx.transpose()).eval();

    out.k[i] = k;
    out.K[i] = K;
    out.V_x[i] = V_x;
    out.V_xx[i] = V_xx;
  }
  return out;
}

}  // namespace kdplan
