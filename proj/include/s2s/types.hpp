#pragma once

#include <array>
#include <cmath>
#include <string_view>

#include <Eigen/Dense>

namespace s2s {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using RowVec2 = Eigen::RowVector2d;

/// Pre-impact horizontal COM state: position relative to the stance pivot
/// and velocity. This is the state on the impact Poincare section.
struct ComState {
  double p = 0.0;
  double v = 0.0;

  Vec2 vec() const { return {p, v}; }
  static ComState from(const Vec2& x) { return {x(0), x(1)}; }
  bool finite() const { return std::isfinite(p) && std::isfinite(v); }

  friend bool operator==(const ComState&, const ComState&) = default;
};

enum class Stance { Left = 0, Right = 1 };

constexpr Stance other(Stance s) {
  return s == Stance::Left ? Stance::Right : Stance::Left;
}

constexpr std::string_view to_string(Stance s) {
  return s == Stance::Left ? "L" : "R";
}

/// A value stored once per stance leg.
template <class T>
struct PerLeg {
  T left{};
  T right{};

  T& operator[](Stance s) { return s == Stance::Left ? left : right; }
  const T& operator[](Stance s) const { return s == Stance::Left ? left : right; }

  static PerLeg both(const T& value) { return {value, value}; }
};

/// Vertical COM height and step timing of the gait. Together they determine
/// the H-LIP step-to-step matrices.
struct GaitParams {
  double z_com = 0.75;
  double t_ssp = 0.3;
  double t_dsp = 0.0;
  double gravity = 9.81;

  double lambda() const { return std::sqrt(gravity / z_com); }
  double period() const { return t_ssp + t_dsp; }

  /// Throws std::invalid_argument on a non-physical gait.
  void validate() const;
};

enum class OrbitKind { P1, P2 };

constexpr std::string_view to_string(OrbitKind k) { return k == OrbitKind::P1 ? "P1" : "P2"; }

/// Desired step sizes and the matching periodic pre-impact states.
///
/// For a P1 orbit both legs carry the same entries. For a P2 orbit the entry
/// for a stance leg is the state at the start of a step on that leg and the
/// step size commanded during it.
struct OrbitTarget {
  OrbitKind kind = OrbitKind::P1;
  double v_des = 0.0;
  double period = 0.0;
  PerLeg<double> u_star;
  PerLeg<ComState> x_star;
};

}  // namespace s2s
