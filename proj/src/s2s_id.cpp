#include "s2s/s2s_id.hpp"

#include <stdexcept>

#include "s2s/hlip.hpp"

namespace s2s::ident {

namespace {

void check_gain(const Eigen::MatrixXd& gamma, Eigen::Index n) {
  if (gamma.rows() != n || gamma.cols() != n)
    throw std::invalid_argument("adaptive gain has wrong dimensions");
  if (!gamma.allFinite()) throw std::invalid_argument("adaptive gain is not finite");
  const double scale = std::max(1.0, gamma.cwiseAbs().maxCoeff());
  if ((gamma - gamma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("adaptive gain is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(gamma);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("adaptive gain is not positive definite");
}

}  // namespace

Regressor make_regressor(const ComState& x_prev, double u_prev) {
  return {Vec4{x_prev.p, x_prev.v, u_prev, 1.0}};
}

Eigen::VectorXd predict(const Eigen::MatrixXd& theta, const Eigen::VectorXd& phi) {
  if (theta.rows() != phi.size())
    throw std::invalid_argument("predict: theta has " + std::to_string(theta.rows()) +
                                " rows but regressor has " + std::to_string(phi.size()) +
                                " entries");
  return theta.transpose() * phi;
}

RawUpdate projection_update(const Eigen::MatrixXd& theta, const Eigen::VectorXd& phi,
                            const Eigen::VectorXd& z, const Eigen::MatrixXd& gamma, double eps) {
  if (theta.rows() != phi.size() || theta.cols() != z.size())
    throw std::invalid_argument("projection_update: dimension mismatch");
  if (!(eps >= 0.0)) throw std::invalid_argument("projection_update: eps must be >= 0");
  check_gain(gamma, phi.size());

  const double denom = phi.squaredNorm() + eps;
  if (denom < kSkipThreshold) return {theta, true};
  const Eigen::VectorXd residual = z - theta.transpose() * phi;
  return {theta + gamma * phi * residual.transpose() / denom, false};
}

RawUpdate horizon_update(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& window,
                         const Eigen::MatrixXd& z, const Eigen::MatrixXd& gamma, double eps) {
  if (window.cols() < 1) throw std::invalid_argument("horizon_update: empty window");
  if (theta.rows() != window.rows() || z.rows() != window.cols() || z.cols() != theta.cols())
    throw std::invalid_argument("horizon_update: dimension mismatch");
  if (!(eps >= 0.0)) throw std::invalid_argument("horizon_update: eps must be >= 0");
  check_gain(gamma, window.rows());

  Eigen::MatrixXd gram = window.transpose() * window;
  gram.diagonal().array() += eps;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < kSkipThreshold) return {theta, true};

  const Eigen::MatrixXd residual = z - window.transpose() * theta;
  return {theta + gamma * window * gram.ldlt().solve(residual), false};
}

ThetaState init_state_theta(const GaitParams& gait) {
  const auto m = hlip::s2s_matrices(gait);
  return ThetaState::pack(m.a, m.b, Vec2::Zero());
}

ThetaOutput init_output_theta(const GaitParams& gait) {
  const auto m = hlip::s2s_matrices(gait);
  return ThetaOutput::pack(m.a, m.b, Vec2::Zero(), RowVec2::Zero(), 1.0, 0.0);
}

}  // namespace s2s::ident
