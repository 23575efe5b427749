#pragma once

#include "s2s/types.hpp"

namespace s2s::hlip {

inline constexpr double kDefaultDt = 1e-4;
inline constexpr double kDefaultP2Offset = 0.2;

/// Flow of the single-support LIP dynamics p'' = lambda^2 p over time t.
Mat2 ssp_transition(double lambda, double t);

/// Flow of the double-support phase (constant velocity) over time t.
Mat2 dsp_transition(double t);

struct HlipMatrices {
  Mat2 a;
  Vec2 b;
};

/// Closed-form S2S map x+ = A x + B u of the H-LIP.
///
/// Event convention used throughout the library: at touchdown (end of SSP)
/// the position is re-expressed about the new pivot, p+ = p- - u, with the
/// velocity continuous; then DSP at constant velocity, then SSP. Hence
/// A = M_ssp(t_ssp) M_dsp(t_dsp) and B = -M_ssp(t_ssp) e1.
HlipMatrices s2s_matrices(const GaitParams& gait);

/// RK4 integration of p'' = lambda^2 p + accel over `duration`, using the
/// largest step not exceeding dt that divides the interval evenly.
Vec2 integrate_ssp(const Vec2& x, double lambda, double duration, double accel, double dt);

/// Numerical counterpart of s2s_matrices: applies the touchdown shift,
/// integrates DSP exactly and SSP with RK4. Used as an oracle.
ComState integrate_step(const ComState& x, double u, const GaitParams& gait,
                        double dt = kDefaultDt);

/// u = u_ref + k (x - x_ref).
double baseline_controller(const ComState& x, const ComState& x_ref, double u_ref,
                           const RowVec2& k);

/// Nominal P1 or P2 orbit of the H-LIP walking at v_des.
///
/// P2 orbits are not unique; u_offset picks one (u_L = v T + u_offset and
/// u_R = 2 v T - u_L).
OrbitTarget nominal_orbit(const GaitParams& gait, double v_des, OrbitKind kind,
                          double u_offset = kDefaultP2Offset);

}  // namespace s2s::hlip
