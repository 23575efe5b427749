#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "s2s/errors.hpp"
#include "s2s/gains.hpp"
#include "s2s/hlip.hpp"
#include "s2s/stepping.hpp"

using namespace s2s;
using namespace s2s::gains;

namespace {

const GaitParams kSagittal{0.75, 0.3, 0.0, 9.81};

}  // namespace

TEST(SpectralRadius, KnownMatrices) {
  EXPECT_NEAR(spectral_radius(Mat2(Mat2::Identity())), 1.0, 1e-15);
  Mat2 nil;
  nil << 0, 1, 0, 0;
  EXPECT_EQ(spectral_radius(nil), 0.0);
  const double th = 0.7;
  Mat2 rot;
  rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  EXPECT_NEAR(spectral_radius(Mat2(0.5 * rot)), 0.5, 1e-15);
}

TEST(SpectralRadius, GeneralMatrixAgreesWithEigenvalues) {
  Eigen::Matrix3d m;
  m << 0.5, 0.1, 0.0, -0.2, 0.3, 0.4, 0.0, 0.0, -0.9;
  EXPECT_NEAR(spectral_radius(Eigen::MatrixXd(m)), 0.9, 1e-12);
  EXPECT_THROW(spectral_radius(Eigen::MatrixXd(2, 3)), std::invalid_argument);
}

TEST(Controllability, Cases) {
  EXPECT_FALSE(controllability_ok(Mat2::Identity(), Vec2::Zero()));
  EXPECT_FALSE(controllability_ok(Mat2::Identity(), Vec2(1.0, 0.0)));
  const auto m = hlip::s2s_matrices(kSagittal);
  EXPECT_TRUE(controllability_ok(m.a, m.b));
}

TEST(Deadbeat, NilpotentModelNeedsNoFeedback) {
  const auto k = deadbeat_gain(Mat2::Zero(), Vec2(1.0, 0.5));
  EXPECT_EQ(k.k, RowVec2::Zero());
}

TEST(Deadbeat, ZeroInputMatrixIsUncontrollable) {
  EXPECT_THROW(deadbeat_gain(Mat2::Identity(), Vec2::Zero()), UncontrollableModelError);
  EXPECT_THROW(deadbeat_gain(Mat2::Zero(), Vec2::Zero()), UncontrollableModelError);
}

TEST(Deadbeat, RankDeficientPairIsUncontrollable) {
  EXPECT_THROW(deadbeat_gain(Mat2::Identity(), Vec2(1.0, 0.0)), UncontrollableModelError);
}

TEST(Deadbeat, HlipClosedLoopIsNilpotent) {
  const auto m = hlip::s2s_matrices(kSagittal);
  const auto k = deadbeat_gain(m.a, m.b);
  const Mat2 acl = m.a + m.b * k.k;
  EXPECT_LE((acl * acl).norm(), 1e-10);
  // Characteristic polynomial of a nilpotent 2x2 is s^2: trace and determinant vanish.
  EXPECT_NEAR(acl.trace(), 0.0, 1e-10);
  EXPECT_NEAR(acl.determinant(), 0.0, 1e-10);
  EXPECT_LE(k.closed_loop_spectral_radius, 1e-5);
}

TEST(Deadbeat, RandomControllablePairsAreNilpotent) {
  oracle::Rng rng(43);
  for (int i = 0; i < 100; ++i) {
    const Mat2 a = rng.mat(-2, 2);
    const Vec2 b = rng.vec(-2, 2);
    if (!controllability_ok(a, b, 1e-3)) continue;
    const auto k = deadbeat_gain(a, b);
    const Mat2 acl = a + b * k.k;
    EXPECT_LE((acl * acl).norm(), 1e-10 * (1.0 + a.norm() * a.norm())) << "case " << i;
  }
}

TEST(Deadbeat, ExactHlipPlantReachesOrbitInTwoSteps) {
  const auto m = hlip::s2s_matrices(kSagittal);
  const auto k = deadbeat_gain(m.a, m.b);
  const auto target = hlip::nominal_orbit(kSagittal, 0.5, OrbitKind::P1);
  const Vec2 xs = target.x_star.left.vec();
  oracle::Rng rng(47);
  for (int i = 0; i < 50; ++i) {
    Vec2 x = rng.vec(-0.3, 0.3);
    for (int step = 0; step < 2; ++step) {
      const double u = hlip::baseline_controller(ComState::from(x), target.x_star.left,
                                                 target.u_star.left, k.k);
      x = m.a * x + m.b * u;
    }
    EXPECT_LE((x - xs).norm(), 1e-9);
  }
}

TEST(Dlqr, NilpotentDynamicsGiveOneStepSolution) {
  for (int n : {1, 2, 3}) {
    const Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd b = Eigen::MatrixXd::Ones(n, 1);
    const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n) * 2.0;
    const auto s = dlqr(a, b, q, Eigen::MatrixXd::Identity(1, 1));
    EXPECT_LE((s.p - q).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE(s.k.cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Dlqr, ScalarGoldenRatio) {
  const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  const auto s = dlqr(one, one, one, one);
  const double p = oracle::scalar_dare(1, 1, 1, 1);
  EXPECT_NEAR(p, (1.0 + std::sqrt(5.0)) / 2.0, 1e-15);
  EXPECT_NEAR(s.p(0, 0), p, 1e-10);
  EXPECT_NEAR(s.k(0, 0), -p / (1.0 + p), 1e-10);
  EXPECT_NEAR(s.k(0, 0), -0.6180339887, 1e-9);
}

TEST(Dlqr, ScalarAgreesWithClosedFormRoot) {
  oracle::Rng rng(53);
  for (int i = 0; i < 20; ++i) {
    const double a = rng.uniform(-2, 2), b = rng.uniform(0.2, 2);
    const double q = rng.uniform(0.1, 3), r = rng.uniform(0.1, 3);
    const auto s = dlqr(Eigen::MatrixXd::Constant(1, 1, a), Eigen::MatrixXd::Constant(1, 1, b),
                        Eigen::MatrixXd::Constant(1, 1, q), Eigen::MatrixXd::Constant(1, 1, r));
    EXPECT_NEAR(s.p(0, 0), oracle::scalar_dare(a, b, q, r), 1e-9 * (1.0 + s.p(0, 0)));
  }
}

TEST(Dlqr, RiccatiResidualOnRandomPairs) {
  oracle::Rng rng(59);
  int solved = 0;
  for (int i = 0; i < 50; ++i) {
    const Mat2 a = rng.mat(-1.5, 1.5);
    const Vec2 b = rng.vec(-1, 1);
    if (!controllability_ok(a, b, 1e-2)) continue;
    const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd r = Eigen::MatrixXd::Identity(1, 1);
    const auto s = dlqr(a, b, q, r);
    EXPECT_LE(dare_residual(a, b, q, r, s.p), 1e-10 * (1.0 + s.p.norm()));
    EXPECT_LT(s.closed_loop_spectral_radius, 1.0);
    ++solved;
  }
  EXPECT_GT(solved, 30);
}

TEST(Dlqr, GainIsLocallyOptimal) {
  const auto m = hlip::s2s_matrices(kSagittal);
  const Mat2 q = Mat2::Identity();
  const double r = 0.5;
  const auto k = lqr_gain(m.a, m.b, q, r);
  const Mat2 best = oracle::policy_cost(m.a, m.b, k.k, q, r);
  const Vec2 x0(0.1, -0.2);
  const double j0 = x0.dot(best * x0);
  for (const RowVec2& d : {RowVec2(1e-3, 0), RowVec2(-1e-3, 0), RowVec2(0, 1e-3),
                           RowVec2(0, -1e-3)}) {
    const Mat2 p = oracle::policy_cost(m.a, m.b, k.k + d, q, r);
    EXPECT_GT(x0.dot(p * x0), j0);
  }
}

TEST(Dlqr, UnstabilizablePairDiverges) {
  Mat2 a = 2.0 * Mat2::Identity();
  EXPECT_THROW(dlqr(a, Eigen::MatrixXd(Vec2(1.0, 0.0)), Eigen::MatrixXd::Identity(2, 2),
                    Eigen::MatrixXd::Identity(1, 1), 1e-12, 2000),
               RiccatiDivergenceError);
}

TEST(Dlqr, RejectsBadWeights) {
  EXPECT_THROW(dlqr(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Ones(2, 1),
                    Eigen::MatrixXd::Identity(2, 2), -Eigen::MatrixXd::Identity(1, 1)),
               std::invalid_argument);
  EXPECT_THROW(dlqr(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Ones(3, 1),
                    Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(1, 1)),
               std::invalid_argument);
}

TEST(Synthesize, DispatchesOnMethod) {
  const auto m = hlip::s2s_matrices(kSagittal);
  GainOptions opt;
  const auto db = synthesize(m.a, m.b, opt);
  EXPECT_EQ(db.method, GainMethod::Deadbeat);
  EXPECT_EQ(db.k, deadbeat_gain(m.a, m.b).k);
  opt.method = GainMethod::Lqr;
  const auto lq = synthesize(m.a, m.b, opt);
  EXPECT_EQ(lq.method, GainMethod::Lqr);
  EXPECT_LT(lq.closed_loop_spectral_radius, 1.0);
  EXPECT_GT(lq.closed_loop_spectral_radius, 0.0);
}
