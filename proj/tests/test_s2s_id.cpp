#include <gtest/gtest.h>

#include "oracles.hpp"
#include "s2s/hlip.hpp"
#include "s2s/s2s_id.hpp"

using namespace s2s;
using namespace s2s::ident;

namespace {

const GaitParams kSagittal{0.75, 0.3, 0.0, 9.81};

ThetaState random_state_block(oracle::Rng& rng) {
  return ThetaState::pack(rng.mat(-1, 1), rng.vec(-1, 1), rng.vec(-1, 1));
}

ThetaOutput random_output_block(oracle::Rng& rng) {
  return ThetaOutput::pack(rng.mat(-1, 1), rng.vec(-1, 1), rng.vec(-1, 1),
                           RowVec2(rng.uniform(-1, 1), rng.uniform(-1, 1)), rng.uniform(0.5, 1.5),
                           rng.uniform(-0.1, 0.1));
}

}  // namespace

TEST(Regressor, Layout) {
  EXPECT_EQ(make_regressor({0.0, 0.0}, 0.0).phi, Vec4(0, 0, 0, 1));
  EXPECT_EQ(make_regressor({0.1, 0.4}, 0.2).phi, Vec4(0.1, 0.4, 0.2, 1));
  EXPECT_EQ(make_regressor({-5.0, 3.0}, 9.0).phi(3), 1.0);
}

TEST(Predict, ZeroParametersPredictZero) {
  EXPECT_EQ(predict(ThetaState(), make_regressor({0.3, 0.2}, 0.1)), Vec2::Zero());
}

TEST(Predict, InitialModelIsHlip) {
  const auto theta = init_state_theta(kSagittal);
  const auto m = hlip::s2s_matrices(kSagittal);
  const ComState x{0.05, 0.4};
  const double u = 0.17;
  EXPECT_LE((predict(theta, make_regressor(x, u)) - (m.a * x.vec() + m.b * u)).norm(), 1e-15);
}

TEST(Predict, BlockwiseEqualsPackedProduct) {
  oracle::Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto th = random_output_block(rng);
    const ComState x = ComState::from(rng.vec(-1, 1));
    const double u = rng.uniform(-1, 1);
    const auto packed = predict(th, make_regressor(x, u));
    const Vec2 state = th.a() * x.vec() + th.b() * u + th.c();
    const double y = th.d().dot(x.vec()) + th.e() * u + th.f();
    EXPECT_LE((packed.head<2>() - state).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE(std::abs(packed(2) - y), 1e-14);
  }
}

TEST(Predict, DynamicDimensionMismatchThrows) {
  EXPECT_THROW(predict(Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Ones(4)),
               std::invalid_argument);
}

TEST(ParamBlock, FlattenIsRowMajorTransposedTheta) {
  Mat2 a;
  a << 1, 2, 3, 4;
  const auto th = ThetaOutput::pack(a, Vec2(5, 6), Vec2(7, 8), RowVec2(9, 10), 11, 12);
  const auto flat = th.flatten();
  // Theta^T = [A B C; D E F] = [[1 2 5 7], [3 4 6 8], [9 10 11 12]] read as
  // a11 a12 a21 a22 b1 b2 c1 c2 d1 d2 e f.
  const std::array<double, 12> expected{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  EXPECT_EQ(flat, expected);
  EXPECT_EQ(ThetaState::pack(a, Vec2(5, 6), Vec2(7, 8)).flatten(),
            (std::array<double, 8>{1, 2, 3, 4, 5, 6, 7, 8}));
}

TEST(ProjectionUpdate, ZeroResidualLeavesParametersUnchanged) {
  oracle::Rng rng(5);
  const auto th = random_state_block(rng);
  const auto phi = make_regressor({0.2, -0.1}, 0.3);
  const Vec2 z = predict(th, phi);
  for (double g : {0.01, 0.2, 1.0}) {
    const auto r = projection_update(th, phi, z, g * Mat4::Identity());
    EXPECT_LE((r.block.packed() - th.packed()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(ProjectionUpdate, UnitGainInterpolatesNewestSample) {
  oracle::Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const auto th = random_output_block(rng);
    const auto phi = make_regressor(ComState::from(rng.vec(-1, 1)), rng.uniform(-1, 1));
    const Eigen::Vector3d z(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const auto r = projection_update(th, phi, z, Mat4::Identity(), 0.0);
    EXPECT_FALSE(r.skipped);
    EXPECT_LE((predict(r.block, phi) - z).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ProjectionUpdate, ScalarGainContractsResidualByKnownFactor) {
  // With Gamma = g I the post-update residual is (1 - g |phi|^2 / (|phi|^2 + eps)) times the
  // prior residual.
  oracle::Rng rng(13);
  const auto th = random_state_block(rng);
  const auto phi = make_regressor({0.3, 0.5}, -0.2);
  const Vec2 z(0.4, -0.7);
  const double g = 0.2;
  const double eps = 1e-3;
  const double n2 = phi.phi.squaredNorm();
  const Vec2 before = z - predict(th, phi);
  const auto r = projection_update(th, phi, z, g * Mat4::Identity(), eps);
  const Vec2 after = z - predict(r.block, phi);
  EXPECT_LE((after - (1.0 - g * n2 / (n2 + eps)) * before).norm(), 1e-14);
}

TEST(ProjectionUpdate, SkipsDegenerateRegressor) {
  const Eigen::MatrixXd th = Eigen::MatrixXd::Ones(4, 2);
  const auto r = projection_update(th, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Ones(2),
                                   Eigen::MatrixXd::Identity(4, 4), 0.0);
  EXPECT_TRUE(r.skipped);
  EXPECT_EQ(r.theta, th);
}

TEST(ProjectionUpdate, RejectsInvalidGain) {
  const auto th = ThetaState();
  const auto phi = make_regressor({0, 0}, 0);
  Mat4 asym = Mat4::Identity();
  asym(0, 1) = 0.5;
  EXPECT_THROW(projection_update(th, phi, Vec2::Zero(), asym), std::invalid_argument);
  EXPECT_THROW(projection_update(th, phi, Vec2::Zero(), Mat4(-Mat4::Identity())),
               std::invalid_argument);
  EXPECT_THROW(projection_update(th, phi, Vec2::Zero(), Mat4::Identity(), -1.0),
               std::invalid_argument);
}

TEST(ProjectionUpdate, ParameterErrorIsMonotoneOnNoiselessPlant) {
  oracle::Rng rng(17);
  const Mat2 a_true = rng.stable(0.8);
  const Vec2 b_true = rng.vec(-1, 1);
  const Vec2 c_true = rng.vec(-0.1, 0.1);
  const auto truth = ThetaState::pack(a_true, b_true, c_true);
  auto th = init_state_theta(kSagittal);
  const Mat4 gamma = 0.2 * Mat4::Identity();

  Vec2 x = Vec2::Zero();
  const double err0 = (th.packed() - truth.packed()).norm();
  double err = err0;
  for (int k = 0; k < 500; ++k) {
    const double u = rng.uniform(-1, 1);
    const Vec2 next = a_true * x + b_true * u + c_true;
    th = projection_update(th, make_regressor(ComState::from(x), u), next, gamma).block;
    const double e = (th.packed() - truth.packed()).norm();
    EXPECT_LE(e, err + 1e-14) << "step " << k;
    err = e;
    x = next;
  }
  EXPECT_LT(err, 0.5 * err0);
}

TEST(HorizonUpdate, SingleColumnReducesToProjection) {
  oracle::Rng rng(19);
  for (int i = 0; i < 20; ++i) {
    const auto th = random_state_block(rng);
    const auto phi = make_regressor(ComState::from(rng.vec(-1, 1)), rng.uniform(-1, 1));
    const Vec2 z = rng.vec(-1, 1);
    const Mat4 gamma = rng.uniform(0.05, 1.0) * Mat4::Identity();
    const auto a = projection_update(th, phi, z, gamma, 1e-8);
    const auto b = horizon_update(th, Eigen::MatrixXd(phi.phi), Eigen::MatrixXd(z.transpose()),
                                  gamma, 1e-8);
    EXPECT_LE((a.block.packed() - b.block.packed()).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(HorizonUpdate, ZeroResidualWindowLeavesParametersUnchanged) {
  oracle::Rng rng(23);
  const auto th = random_state_block(rng);
  Eigen::MatrixXd window(4, 3);
  Eigen::MatrixXd z(3, 2);
  for (int j = 0; j < 3; ++j) {
    const auto phi = make_regressor(ComState::from(rng.vec(-1, 1)), rng.uniform(-1, 1));
    window.col(j) = phi.phi;
    z.row(j) = predict(th, phi).transpose();
  }
  const auto r = horizon_update(th, window, z, 0.3 * Mat4::Identity());
  EXPECT_LE((r.block.packed() - th.packed()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(HorizonUpdate, FullRankWindowIsFitWithUnitGain) {
  oracle::Rng rng(29);
  const auto truth = random_state_block(rng);
  const auto th = random_state_block(rng);
  Eigen::MatrixXd window(4, 4);
  Eigen::MatrixXd z(4, 2);
  for (int j = 0; j < 4; ++j) {
    const auto phi = make_regressor(ComState::from(rng.vec(-1, 1)), rng.uniform(-1, 1));
    window.col(j) = phi.phi;
    z.row(j) = predict(truth, phi).transpose();
  }
  const auto r = horizon_update(th, window, z, Mat4::Identity(), 0.0);
  // Normal-equations oracle: the post-update residual over the window vanishes.
  const Eigen::MatrixXd residual = z - window.transpose() * r.block.packed();
  EXPECT_LE(residual.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(HorizonUpdate, SkipsRankDeficientWindowWithoutRegularization) {
  const Eigen::MatrixXd th = Eigen::MatrixXd::Zero(4, 2);
  Eigen::MatrixXd window(4, 2);
  window.col(0) = Vec4(0.1, 0.2, 0.3, 1.0);
  window.col(1) = window.col(0);
  const auto r = horizon_update(th, window, Eigen::MatrixXd::Ones(2, 2),
                                Eigen::MatrixXd::Identity(4, 4), 0.0);
  EXPECT_TRUE(r.skipped);
}

TEST(HorizonUpdate, EmptyWindowThrows) {
  EXPECT_THROW(horizon_update(Eigen::MatrixXd::Zero(4, 2), Eigen::MatrixXd(4, 0),
                              Eigen::MatrixXd(0, 2), Eigen::MatrixXd::Identity(4, 4), 1e-8),
               std::invalid_argument);
}

TEST(InitialModels, StateFormIsHlipWithZeroBias) {
  const auto th = init_state_theta(kSagittal);
  const auto m = hlip::s2s_matrices(kSagittal);
  EXPECT_EQ(th.c(), Vec2::Zero());
  EXPECT_EQ(th.a(), m.a);
  EXPECT_EQ(th.b(), m.b);
}

TEST(InitialModels, StateFormPredictsExactHlipData) {
  const GaitParams g{0.65, 0.4, 0.1, 9.81};
  const auto th = init_state_theta(g);
  oracle::Rng rng(31);
  for (int k = 0; k < 20; ++k) {
    const Vec2 x = rng.vec(-0.1, 0.1);
    const double u = rng.uniform(-0.3, 0.3);
    const Vec2 next = oracle::lip_step(x, u, g);
    // The integrator oracle itself carries ~1e-11 truncation error at dt = 1e-5.
    EXPECT_LE((predict(th, make_regressor(ComState::from(x), u)) - next).norm(), 1e-10);
  }
}

TEST(InitialModels, OutputFormPassesInputThrough) {
  const auto th = init_output_theta(kSagittal);
  EXPECT_EQ(th.e(), 1.0);
  EXPECT_EQ(th.d(), RowVec2::Zero());
  EXPECT_EQ(th.f(), 0.0);
  EXPECT_EQ(th.c(), Vec2::Zero());
  oracle::Rng rng(37);
  for (int i = 0; i < 10; ++i) {
    const double u = rng.uniform(-1, 1);
    EXPECT_DOUBLE_EQ(predict(th, make_regressor(ComState::from(rng.vec(-1, 1)), u))(2), u);
  }
}

TEST(RegressorWindow, KeepsNewestEntries) {
  RegressorWindow<2> w(2);
  EXPECT_THROW(RegressorWindow<2>(0), std::invalid_argument);
  for (int i = 0; i < 3; ++i) w.push(make_regressor({double(i), 0.0}, 0.0), Vec2(i, i));
  EXPECT_EQ(w.size(), 2);
  EXPECT_EQ(w.regressors()(0, 0), 1.0);
  EXPECT_EQ(w.regressors()(0, 1), 2.0);
  EXPECT_EQ(w.measurements()(1, 0), 2.0);
}

TEST(OnlineEstimator, FreezesAcceptedModelOnRejection) {
  const auto init = init_state_theta(kSagittal);
  OnlineEstimator<2> est(init, {});
  const auto st = est.update(make_regressor({0.1, 0.2}, 0.1), Vec2(1.0, 1.0),
                             [](const ThetaState&) { return false; });
  EXPECT_FALSE(st.accepted);
  EXPECT_EQ(est.accepted(), init);
  EXPECT_FALSE(est.estimate() == init);
}

TEST(OnlineEstimator, FollowsEstimateWhenFreezeDisabled) {
  const auto init = init_state_theta(kSagittal);
  EstimatorOptions opt;
  opt.freeze_on_reject = false;
  OnlineEstimator<2> est(init, opt);
  est.update(make_regressor({0.1, 0.2}, 0.1), Vec2(1.0, 1.0),
             [](const ThetaState&) { return false; });
  EXPECT_EQ(est.accepted(), est.estimate());
}

TEST(OnlineEstimator, ReportsPriorResidual) {
  const auto init = init_state_theta(kSagittal);
  OnlineEstimator<2> est(init, {});
  const auto phi = make_regressor({0.1, 0.2}, 0.1);
  const Vec2 z = predict(init, phi) + Vec2(0.3, 0.4);
  EXPECT_NEAR(est.update(phi, z).residual, 0.5, 1e-14);
}

TEST(OnlineEstimator, WindowedEstimatorConvergesOnNoiselessPlant) {
  oracle::Rng rng(41);
  const auto truth = ThetaState::pack(rng.stable(0.8), rng.vec(-1, 1), rng.vec(-0.1, 0.1));
  EstimatorOptions opt;
  opt.gamma = 0.5;
  opt.window = 4;
  OnlineEstimator<2> est(init_state_theta(kSagittal), opt);
  Vec2 x = Vec2::Zero();
  for (int k = 0; k < 300; ++k) {
    const double u = rng.uniform(-1, 1);
    const auto phi = make_regressor(ComState::from(x), u);
    const Vec2 next = predict(truth, phi);
    est.update(phi, next);
    x = next;
  }
  EXPECT_LE((est.estimate().packed() - truth.packed()).norm(), 1e-8);
}
