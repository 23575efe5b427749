#include "s2s/stepping.hpp"

#include <algorithm>
#include <stdexcept>

#include "s2s/errors.hpp"

namespace s2s::stepping {

namespace {

Vec2 checked_solve(const Mat2& m, const Vec2& rhs, const char* what) {
  Eigen::JacobiSVD<Mat2> svd(m);
  const auto& s = svd.singularValues();
  if (!m.allFinite() || !(s(1) > 0.0) || s(0) / s(1) > kMaxCondition)
    throw SingularModelError(std::string(what) + ": matrix is singular or ill conditioned");
  return m.partialPivLu().solve(rhs);
}

}  // namespace

ComState p1_fixed_point(const Mat2& a, const Vec2& b, const Vec2& c, double u_star) {
  return ComState::from(checked_solve(Mat2::Identity() - a, b * u_star + c, "p1_fixed_point"));
}

PerLeg<ComState> p2_fixed_points(const PerLeg<Mat2>& a, const PerLeg<Vec2>& b,
                                 const PerLeg<Vec2>& c, const PerLeg<double>& u_star) {
  PerLeg<ComState> out;
  for (Stance s : {Stance::Left, Stance::Right}) {
    const Stance o = other(s);
    const Vec2 rhs = a[o] * b[s] * u_star[s] + b[o] * u_star[o] + a[o] * c[s] + c[o];
    out[s] = ComState::from(checked_solve(Mat2::Identity() - a[o] * a[s], rhs, "p2_fixed_points"));
  }
  return out;
}

PerLeg<double> desired_step_sizes(OrbitKind kind, double v_des, double period, double u_offset) {
  if (kind == OrbitKind::P1) return PerLeg<double>::both(v_des * period);
  const double left = v_des * period + u_offset;
  return {left, 2.0 * v_des * period - left};
}

double state_tracking_controller(const ComState& x, const OrbitTarget& target,
                                 const PerLeg<gains::FeedbackGain>& k, Stance stance) {
  return target.u_star[stance] + k[stance].k.dot(x.vec() - target.x_star[stance].vec());
}

namespace {

void split_offset(double w, double r, double r_threshold, OutputFeedforward& ff) {
  if (std::abs(r) <= r_threshold) {
    ff.k_f = 0.0;
    ff.b_f = w;
  } else {
    ff.k_f = w / r;
    ff.b_f = 0.0;
  }
}

}  // namespace

OutputFeedforward output_feedforward(const ident::ThetaOutput& theta,
                                     const gains::FeedbackGain& k, double r, double r_threshold) {
  const Mat2 a = theta.a();
  const Vec2 b = theta.b();
  const Mat2 closed = Mat2::Identity() - a - b * k.k;
  Eigen::JacobiSVD<Mat2> svd(closed);
  const auto& s = svd.singularValues();
  if (!closed.allFinite() || !(s(1) > 0.0) || s(0) / s(1) > kMaxCondition)
    throw SingularModelError("output_feedforward: I - A - B K is ill conditioned");

  OutputFeedforward ff;
  ff.m = (theta.d() + theta.e() * k.k) * closed.inverse();
  const double gain = ff.m.dot(b) + theta.e();
  if (std::abs(gain) < kDegenerateFeedforward)
    throw DegenerateFeedforwardError("output_feedforward: M B + E is numerically zero");
  const double w = (r - theta.f() - ff.m.dot(theta.c())) / gain;
  split_offset(w, r, r_threshold, ff);
  return ff;
}

PerLeg<OutputFeedforward> output_feedforward_p2(const ident::LegModels<3>& models,
                                                const PerLeg<gains::FeedbackGain>& k,
                                                const PerLeg<double>& r, double r_threshold) {
  // Closed loop per leg: x_next = Acl_s x + B_s w_s + C_s, output
  // y_s = G_s x + E_s w_s + F_s with G_s = D_s + E_s K_s. On the period-2
  // equilibrium x_L = (I - Acl_R Acl_L)^-1 (Acl_R (B_L w_L + C_L) + B_R w_R + C_R)
  // and x_R = Acl_L x_L + B_L w_L + C_L; both are affine in (w_L, w_R).
  const auto& ml = models.left;
  const auto& mr = models.right;
  const Mat2 acl_l = ml.a() + ml.b() * k.left.k;
  const Mat2 acl_r = mr.a() + mr.b() * k.right.k;
  const Mat2 cycle = Mat2::Identity() - acl_r * acl_l;
  Eigen::JacobiSVD<Mat2> svd(cycle);
  const auto& s = svd.singularValues();
  if (!cycle.allFinite() || !(s(1) > 0.0) || s(0) / s(1) > kMaxCondition)
    throw SingularModelError("output_feedforward_p2: I - Acl_R Acl_L is ill conditioned");
  const Mat2 inv = cycle.inverse();

  // x_L = x0_L + hl_L w_L + hr_L w_R
  const Vec2 x0_l = inv * (acl_r * ml.c() + mr.c());
  const Vec2 hl_l = inv * acl_r * ml.b();
  const Vec2 hr_l = inv * mr.b();
  const Vec2 x0_r = acl_l * x0_l + ml.c();
  const Vec2 hl_r = acl_l * hl_l + ml.b();
  const Vec2 hr_r = acl_l * hr_l;

  const RowVec2 g_l = ml.d() + ml.e() * k.left.k;
  const RowVec2 g_r = mr.d() + mr.e() * k.right.k;

  Mat2 lhs;
  lhs << g_l.dot(hl_l) + ml.e(), g_l.dot(hr_l), g_r.dot(hl_r), g_r.dot(hr_r) + mr.e();
  const Vec2 rhs{r.left - ml.f() - g_l.dot(x0_l), r.right - mr.f() - g_r.dot(x0_r)};
  Eigen::JacobiSVD<Mat2> lsvd(lhs);
  const auto& ls = lsvd.singularValues();
  if (!lhs.allFinite() || !(ls(1) >= kDegenerateFeedforward) ||
      ls(0) / ls(1) > kMaxCondition)
    throw DegenerateFeedforwardError("output_feedforward_p2: offset system is degenerate");
  const Vec2 w = lhs.partialPivLu().solve(rhs);

  PerLeg<OutputFeedforward> ff;
  ff.left.m = g_l * Mat2(Mat2::Identity() - acl_l).inverse();
  ff.right.m = g_r * Mat2(Mat2::Identity() - acl_r).inverse();
  split_offset(w(0), r.left, r_threshold, ff.left);
  split_offset(w(1), r.right, r_threshold, ff.right);
  return ff;
}

double output_tracking_controller(const ComState& x, const gains::FeedbackGain& k,
                                  const OutputFeedforward& ff, double r) {
  return k.k.dot(x.vec()) + ff.offset(r);
}

ComState bias_equilibrium(const Mat2& a, const Vec2& b, const Vec2& c, const RowVec2& k,
                          const Vec2& bias, const ComState& x_ref, double u_ref) {
  const Mat2 bk = b * k;
  const Vec2 rhs = bk * bias - bk * x_ref.vec() + b * u_ref + c;
  return ComState::from(checked_solve(Mat2::Identity() - a - bk, rhs, "bias_equilibrium"));
}

SaturatedStep saturate_step(double u, double u_max) {
  if (!(u_max > 0.0)) throw std::invalid_argument("saturate_step: u_max must be > 0");
  const double clamped = std::clamp(u, -u_max, u_max);
  return {clamped, clamped != u};
}

}  // namespace s2s::stepping
