#include "s2s/hlip.hpp"

#include <stdexcept>
#include <string>

#include "s2s/stepping.hpp"

namespace s2s {

void GaitParams::validate() const {
  auto bad = [](const char* what, double value) {
    throw std::invalid_argument(std::string("gait: ") + what + " = " + std::to_string(value));
  };
  if (!std::isfinite(z_com) || z_com <= 0.0) bad("z_com must be > 0", z_com);
  if (!std::isfinite(t_ssp) || t_ssp <= 0.0) bad("t_ssp must be > 0", t_ssp);
  if (!std::isfinite(t_dsp) || t_dsp < 0.0) bad("t_dsp must be >= 0", t_dsp);
  if (!std::isfinite(gravity) || gravity <= 0.0) bad("gravity must be > 0", gravity);
}

namespace hlip {

Mat2 ssp_transition(double lambda, double t) {
  if (!std::isfinite(lambda) || !std::isfinite(t))
    throw std::invalid_argument("ssp_transition: non-finite input");
  if (lambda <= 0.0 || t < 0.0)
    throw std::invalid_argument("ssp_transition: requires lambda > 0 and t >= 0");
  const double c = std::cosh(lambda * t);
  const double s = std::sinh(lambda * t);
  Mat2 m;
  m << c, s / lambda, lambda * s, c;
  return m;
}

Mat2 dsp_transition(double t) {
  Mat2 m;
  m << 1.0, t, 0.0, 1.0;
  return m;
}

HlipMatrices s2s_matrices(const GaitParams& gait) {
  gait.validate();
  const Mat2 ssp = ssp_transition(gait.lambda(), gait.t_ssp);
  return {ssp * dsp_transition(gait.t_dsp), -ssp.col(0)};
}

Vec2 integrate_ssp(const Vec2& x, double lambda, double duration, double accel, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_ssp: dt must be > 0");
  if (duration <= 0.0) return x;
  const double l2 = lambda * lambda;
  const auto n = static_cast<long>(std::ceil(duration / dt - 1e-9));
  const double h = duration / static_cast<double>(n);

  double p = x(0);
  double v = x(1);
  for (long i = 0; i < n; ++i) {
    const double k1p = v;
    const double k1v = l2 * p + accel;
    const double k2p = v + 0.5 * h * k1v;
    const double k2v = l2 * (p + 0.5 * h * k1p) + accel;
    const double k3p = v + 0.5 * h * k2v;
    const double k3v = l2 * (p + 0.5 * h * k2p) + accel;
    const double k4p = v + h * k3v;
    const double k4v = l2 * (p + h * k3p) + accel;
    p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
  return {p, v};
}

ComState integrate_step(const ComState& x, double u, const GaitParams& gait, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_step: dt must be > 0");
  gait.validate();
  Vec2 s{x.p - u, x.v};
  s(0) += s(1) * gait.t_dsp;
  return ComState::from(integrate_ssp(s, gait.lambda(), gait.t_ssp, 0.0, dt));
}

double baseline_controller(const ComState& x, const ComState& x_ref, double u_ref,
                           const RowVec2& k) {
  return u_ref + k.dot(x.vec() - x_ref.vec());
}

OrbitTarget nominal_orbit(const GaitParams& gait, double v_des, OrbitKind kind, double u_offset) {
  const auto m = s2s_matrices(gait);
  const Vec2 zero = Vec2::Zero();
  const double period = gait.period();

  OrbitTarget target;
  target.kind = kind;
  target.v_des = v_des;
  target.period = period;
  if (kind == OrbitKind::P1) {
    const double u = v_des * period;
    target.u_star = PerLeg<double>::both(u);
    target.x_star = PerLeg<ComState>::both(stepping::p1_fixed_point(m.a, m.b, zero, u));
  } else {
    const double u_left = v_des * period + u_offset;
    const double u_right = 2.0 * v_des * period - u_left;
    target.u_star = {u_left, u_right};
    target.x_star = stepping::p2_fixed_points({m.a, m.a}, {m.b, m.b}, {zero, zero}, target.u_star);
  }
  return target;
}

}  // namespace hlip
}  // namespace s2s
