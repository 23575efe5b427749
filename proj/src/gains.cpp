#include "s2s/gains.hpp"

#include <complex>
#include <stdexcept>
#include <string>

#include "s2s/errors.hpp"

namespace s2s::gains {

double spectral_radius(const Mat2& m) {
  const double tr = m.trace();
  const double det = m.determinant();
  const double disc = 0.25 * tr * tr - det;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    return std::max(std::abs(0.5 * tr + root), std::abs(0.5 * tr - root));
  }
  // complex pair, |lambda|^2 = det
  return std::sqrt(det);
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("spectral_radius: matrix is not square");
  if (m.rows() == 0) return 0.0;
  if (m.rows() == 1) return std::abs(m(0, 0));
  if (m.rows() == 2) return spectral_radius(Mat2(m));
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double controllability_rcond(const Mat2& a, const Vec2& b) {
  Mat2 w;
  w.col(0) = b;
  w.col(1) = a * b;
  Eigen::JacobiSVD<Mat2> svd(w);
  const auto& s = svd.singularValues();
  if (!(s(0) > 0.0) || !std::isfinite(s(0))) return 0.0;
  return s(1) / s(0);
}

bool controllability_ok(const Mat2& a, const Vec2& b, double tol) {
  return controllability_rcond(a, b) >= tol;
}

FeedbackGain deadbeat_gain(const Mat2& a, const Vec2& b, double tol) {
  if (!a.allFinite() || !b.allFinite())
    throw std::invalid_argument("deadbeat_gain: non-finite model");
  if (b.isZero(0.0)) throw UncontrollableModelError("deadbeat_gain: b = 0");

  FeedbackGain g;
  g.method = GainMethod::Deadbeat;
  const Mat2 a2 = a * a;
  if (a2.isZero(0.0)) {
    g.closed_loop_spectral_radius = spectral_radius(a);
    return g;
  }
  if (!controllability_ok(a, b, tol))
    throw UncontrollableModelError("deadbeat_gain: controllability matrix is ill conditioned");

  Mat2 w;
  w.col(0) = b;
  w.col(1) = a * b;
  g.k = -RowVec2(0.0, 1.0) * w.partialPivLu().solve(a2);
  g.closed_loop_spectral_radius = spectral_radius(Mat2(a + b * g.k));
  return g;
}

double dare_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& q,
                     const Eigen::MatrixXd& r, const Eigen::MatrixXd& p) {
  const Eigen::MatrixXd btpa = b.transpose() * p * a;
  const Eigen::MatrixXd rhs = q + a.transpose() * p * a -
                              btpa.transpose() * (r + b.transpose() * p * b).ldlt().solve(btpa);
  return (p - rhs).norm();
}

LqrSolution dlqr(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& q,
                 const Eigen::MatrixXd& r, double tol, int max_iter) {
  const auto n = a.rows();
  const auto m = b.cols();
  if (a.cols() != n || b.rows() != n || q.rows() != n || q.cols() != n || r.rows() != m ||
      r.cols() != m)
    throw std::invalid_argument("dlqr: dimension mismatch");
  if (!a.allFinite() || !b.allFinite() || !q.allFinite() || !r.allFinite())
    throw std::invalid_argument("dlqr: non-finite input");
  Eigen::LLT<Eigen::MatrixXd> r_llt(r);
  if (r_llt.info() != Eigen::Success) throw std::invalid_argument("dlqr: r must be positive definite");

  Eigen::MatrixXd p = q;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::MatrixXd btpa = b.transpose() * p * a;
    Eigen::MatrixXd next = q + a.transpose() * p * a -
                           btpa.transpose() * (r + b.transpose() * p * b).ldlt().solve(btpa);
    next = 0.5 * (next + next.transpose());
    if (!next.allFinite()) break;
    const double change = (next - p).norm();
    p = std::move(next);
    if (change <= tol * std::max(1.0, p.norm())) {
      LqrSolution sol;
      sol.p = p;
      sol.k = -(r + b.transpose() * p * b).ldlt().solve(b.transpose() * p * a);
      sol.closed_loop_spectral_radius = spectral_radius(Eigen::MatrixXd(a + b * sol.k));
      sol.iterations = it;
      if (!(sol.closed_loop_spectral_radius < 1.0))
        throw RiccatiDivergenceError("dlqr: converged gain is not stabilizing");
      return sol;
    }
  }
  throw RiccatiDivergenceError("dlqr: Riccati iteration did not converge in " +
                               std::to_string(max_iter) + " iterations");
}

FeedbackGain lqr_gain(const Mat2& a, const Vec2& b, const Mat2& q, double r, double tol,
                      int max_iter) {
  Eigen::MatrixXd rm(1, 1);
  rm(0, 0) = r;
  const auto sol = dlqr(a, b, q, rm, tol, max_iter);
  FeedbackGain g;
  g.method = GainMethod::Lqr;
  g.k = sol.k;
  g.closed_loop_spectral_radius = spectral_radius(Mat2(a + b * g.k));
  return g;
}

FeedbackGain synthesize(const Mat2& a, const Vec2& b, const GainOptions& options) {
  if (options.method == GainMethod::Deadbeat)
    return deadbeat_gain(a, b, options.controllability_tol);
  if (!controllability_ok(a, b, options.controllability_tol))
    throw UncontrollableModelError("lqr: controllability matrix is ill conditioned");
  return lqr_gain(a, b, options.lqr_q, options.lqr_r, options.riccati_tol,
                  options.riccati_max_iter);
}

}  // namespace s2s::gains
