#pragma once

#include <string_view>

#include "s2s/types.hpp"

namespace s2s::gains {

inline constexpr double kDefaultControllabilityTol = 1e-8;

enum class GainMethod { Deadbeat, Lqr };

constexpr std::string_view to_string(GainMethod m) {
  return m == GainMethod::Deadbeat ? "deadbeat" : "lqr";
}

/// State feedback u = k x for the closed loop A + B k.
struct FeedbackGain {
  RowVec2 k = RowVec2::Zero();
  GainMethod method = GainMethod::Deadbeat;
  double closed_loop_spectral_radius = 0.0;
};

struct GainOptions {
  GainMethod method = GainMethod::Deadbeat;
  Mat2 lqr_q = Mat2::Identity();
  double lqr_r = 1.0;
  double controllability_tol = kDefaultControllabilityTol;
  double riccati_tol = 1e-12;
  int riccati_max_iter = 100000;
};

/// Largest eigenvalue modulus. Closed form for 2x2.
double spectral_radius(const Eigen::MatrixXd& m);
double spectral_radius(const Mat2& m);

/// Reciprocal condition number of [b, a b] (0 when b = 0).
double controllability_rcond(const Mat2& a, const Vec2& b);

/// True when cond([b, a b]) <= 1 / tol.
bool controllability_ok(const Mat2& a, const Vec2& b, double tol = kDefaultControllabilityTol);

/// Ackermann deadbeat gain: k = -[0 1] [b, a b]^-1 a^2, so (a + b k)^2 = 0.
/// An already nilpotent a yields k = 0. Throws UncontrollableModelError when
/// b = 0 or the controllability matrix is ill conditioned.
FeedbackGain deadbeat_gain(const Mat2& a, const Vec2& b,
                           double tol = kDefaultControllabilityTol);

struct LqrSolution {
  Eigen::MatrixXd k;  ///< m x n, u = k x
  Eigen::MatrixXd p;  ///< DARE solution
  double closed_loop_spectral_radius = 0.0;
  int iterations = 0;
};

/// Discrete LQR by fixed-point iteration of the Riccati recursion, started
/// from P = Q. Converged when |P+ - P|_F <= tol * max(1, |P|_F).
LqrSolution dlqr(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& q,
                 const Eigen::MatrixXd& r, double tol = 1e-12, int max_iter = 100000);

/// |P - (Q + A'PA - A'PB (R + B'PB)^-1 B'PA)|_F.
double dare_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& q,
                     const Eigen::MatrixXd& r, const Eigen::MatrixXd& p);

FeedbackGain lqr_gain(const Mat2& a, const Vec2& b, const Mat2& q, double r,
                      double tol = 1e-12, int max_iter = 100000);

/// Dispatches on options.method. Both methods require controllability_ok.
FeedbackGain synthesize(const Mat2& a, const Vec2& b, const GainOptions& options);

}  // namespace s2s::gains
