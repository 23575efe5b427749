#pragma once

#include "s2s/gains.hpp"
#include "s2s/s2s_id.hpp"
#include "s2s/types.hpp"

namespace s2s::stepping {

inline constexpr double kMaxCondition = 1e8;
inline constexpr double kDefaultRThreshold = 1e-6;
inline constexpr double kDegenerateFeedforward = 1e-10;
inline constexpr double kDefaultUMax = 0.8;

/// P1 fixed point x* = (I - A)^-1 (B u* + C).
/// Throws SingularModelError when cond(I - A) > 1e8.
ComState p1_fixed_point(const Mat2& a, const Vec2& b, const Vec2& c, double u_star);

template <int Outputs>
ComState p1_fixed_point(const ident::ParamBlock<Outputs>& theta, double u_star) {
  return p1_fixed_point(theta.a(), theta.b(), theta.c(), u_star);
}

/// Period-2 points of the alternating map in which the model of a stance leg
/// carries the state at the start of that leg's step to the start of the
/// next one:
///   x*_L = (I - A_R A_L)^-1 (A_R B_L u_L + B_R u_R + A_R C_L + C_R)
/// and symmetrically for x*_R.
PerLeg<ComState> p2_fixed_points(const PerLeg<Mat2>& a, const PerLeg<Vec2>& b,
                                 const PerLeg<Vec2>& c, const PerLeg<double>& u_star);

template <int Outputs>
PerLeg<ComState> p2_fixed_points(const ident::LegModels<Outputs>& models,
                                 const PerLeg<double>& u_star) {
  return p2_fixed_points({models.left.a(), models.right.a()}, {models.left.b(), models.right.b()},
                         {models.left.c(), models.right.c()}, u_star);
}

/// Desired step sizes for walking at v_des with step period T.
PerLeg<double> desired_step_sizes(OrbitKind kind, double v_des, double period, double u_offset);

/// Orbit target for the current model estimate. For P1 only models.left is used.
template <int Outputs>
OrbitTarget make_target(OrbitKind kind, double v_des, double period, double u_offset,
                        const ident::LegModels<Outputs>& models) {
  OrbitTarget t;
  t.kind = kind;
  t.v_des = v_des;
  t.period = period;
  t.u_star = desired_step_sizes(kind, v_des, period, u_offset);
  if (kind == OrbitKind::P1) {
    t.x_star = PerLeg<ComState>::both(p1_fixed_point(models.left, t.u_star.left));
  } else {
    t.x_star = p2_fixed_points(models, t.u_star);
  }
  return t;
}

/// u = u*_s + K_s (x - x*_s) for stance s.
double state_tracking_controller(const ComState& x, const OrbitTarget& target,
                                 const PerLeg<gains::FeedbackGain>& k, Stance stance);

struct OutputFeedforward {
  double k_f = 0.0;
  double b_f = 0.0;
  RowVec2 m = RowVec2::Zero();  ///< (D + E K)(I - A - B K)^-1

  double offset(double r) const { return k_f * r + b_f; }
};

/// Feedforward for u = K x + k_f r + b_f such that the model equilibrium
/// output equals r. With w = (M B + E)^-1 (r - F - M C): |r| <= r_threshold
/// gives b_f = w and k_f = 0, otherwise k_f = w / r and b_f = 0.
///
/// Throws SingularModelError if I - A - B K is ill conditioned and
/// DegenerateFeedforwardError if |M B + E| < 1e-10.
OutputFeedforward output_feedforward(const ident::ThetaOutput& theta,
                                     const gains::FeedbackGain& k, double r,
                                     double r_threshold = kDefaultRThreshold);

/// Period-2 generalization: the per-leg offsets are solved jointly so that
/// the outputs on the period-2 equilibrium equal r_L and r_R. Identical legs
/// with r_L = r_R reproduce output_feedforward.
PerLeg<OutputFeedforward> output_feedforward_p2(const ident::LegModels<3>& models,
                                                const PerLeg<gains::FeedbackGain>& k,
                                                const PerLeg<double>& r,
                                                double r_threshold = kDefaultRThreshold);

/// u = K x + k_f r + b_f.
double output_tracking_controller(const ComState& x, const gains::FeedbackGain& k,
                                  const OutputFeedforward& ff, double r);

/// Equilibrium of x+ = A x + B (K (x + bias - x_ref) + u_ref) + C:
///   x_e = (I - A - B K)^-1 (B K bias - B K x_ref + B u_ref + C).
ComState bias_equilibrium(const Mat2& a, const Vec2& b, const Vec2& c, const RowVec2& k,
                          const Vec2& bias, const ComState& x_ref, double u_ref);

struct SaturatedStep {
  double value = 0.0;
  bool saturated = false;
};

SaturatedStep saturate_step(double u, double u_max = kDefaultUMax);

}  // namespace s2s::stepping
