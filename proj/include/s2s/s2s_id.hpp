#pragma once

#include <deque>
#include <functional>

#include "s2s/types.hpp"

namespace s2s::ident {

inline constexpr int kRegressorSize = 4;
inline constexpr double kDefaultEps = 1e-8;
inline constexpr double kSkipThreshold = 1e-12;

/// Regressor phi = [p, v, u, 1] built from the previous pre-impact state and
/// the step size commanded from it.
struct Regressor {
  Vec4 phi = Vec4::UnitW();
};

Regressor make_regressor(const ComState& x_prev, double u_prev);

/// Parameters of the linear S2S model in regressor convention z = Theta^T phi.
///
/// Outputs == 2 holds [A B C]^T (state tracking). Outputs == 3 appends the
/// step-size row [D E F], so that Theta^T = [A B C; D E F] (output tracking).
template <int Outputs>
class ParamBlock {
  static_assert(Outputs == 2 || Outputs == 3);

 public:
  using Packed = Eigen::Matrix<double, kRegressorSize, Outputs>;
  using Output = Eigen::Matrix<double, Outputs, 1>;
  static constexpr int kOutputs = Outputs;

  ParamBlock() : theta_(Packed::Zero()) {}
  explicit ParamBlock(const Packed& theta) : theta_(theta) {}

  static ParamBlock pack(const Mat2& a, const Vec2& b, const Vec2& c)
    requires(Outputs == 2)
  {
    Packed t;
    t.template topRows<2>() = a.transpose();
    t.row(2) = b.transpose();
    t.row(3) = c.transpose();
    return ParamBlock(t);
  }

  static ParamBlock pack(const Mat2& a, const Vec2& b, const Vec2& c, const RowVec2& d, double e,
                         double f)
    requires(Outputs == 3)
  {
    Packed t;
    t.template block<2, 2>(0, 0) = a.transpose();
    t.template block<1, 2>(2, 0) = b.transpose();
    t.template block<1, 2>(3, 0) = c.transpose();
    t.template block<2, 1>(0, 2) = d.transpose();
    t(2, 2) = e;
    t(3, 2) = f;
    return ParamBlock(t);
  }

  Mat2 a() const { return theta_.template block<2, 2>(0, 0).transpose(); }
  Vec2 b() const { return theta_.template block<1, 2>(2, 0).transpose(); }
  Vec2 c() const { return theta_.template block<1, 2>(3, 0).transpose(); }
  RowVec2 d() const
    requires(Outputs == 3)
  {
    return theta_.template block<2, 1>(0, 2).transpose();
  }
  double e() const
    requires(Outputs == 3)
  {
    return theta_(2, 2);
  }
  double f() const
    requires(Outputs == 3)
  {
    return theta_(3, 2);
  }

  const Packed& packed() const { return theta_; }
  bool finite() const { return theta_.allFinite(); }

  /// Theta^T flattened row-major: a11 a12 a21 a22 b1 b2 c1 c2 [d1 d2 e f].
  std::array<double, 4 * Outputs> flatten() const {
    std::array<double, 4 * Outputs> out{};
    const Eigen::Matrix<double, Outputs, kRegressorSize> tt = theta_.transpose();
    std::size_t i = 0;
    for (int r = 0; r < 2; ++r) {
      for (int col = 0; col < 2; ++col) out[i++] = tt(r, col);
    }
    for (int r = 0; r < 2; ++r) out[i++] = tt(r, 2);
    for (int r = 0; r < 2; ++r) out[i++] = tt(r, 3);
    if constexpr (Outputs == 3) {
      out[i++] = tt(2, 0);
      out[i++] = tt(2, 1);
      out[i++] = tt(2, 2);
      out[i++] = tt(2, 3);
    }
    return out;
  }

  friend bool operator==(const ParamBlock& x, const ParamBlock& y) {
    return x.theta_ == y.theta_;
  }

 private:
  Packed theta_;
};

using ThetaState = ParamBlock<2>;
using ThetaOutput = ParamBlock<3>;

template <int Outputs>
using LegModels = PerLeg<ParamBlock<Outputs>>;

/// Theta^T phi.
template <int Outputs>
typename ParamBlock<Outputs>::Output predict(const ParamBlock<Outputs>& theta,
                                             const Regressor& phi) {
  return theta.packed().transpose() * phi.phi;
}

/// Dimension-checked prediction on raw matrices (theta is N x m, phi is N).
Eigen::VectorXd predict(const Eigen::MatrixXd& theta, const Eigen::VectorXd& phi);

struct RawUpdate {
  Eigen::MatrixXd theta;
  bool skipped = false;
};

/// Projection algorithm on raw matrices:
/// Theta+ = Theta + Gamma phi (phi^T phi + eps)^-1 (z - Theta^T phi)^T.
RawUpdate projection_update(const Eigen::MatrixXd& theta, const Eigen::VectorXd& phi,
                            const Eigen::VectorXd& z, const Eigen::MatrixXd& gamma, double eps);

/// Horizon variant: Phi is N x q (oldest column first), Z is q x m.
/// Theta+ = Theta + Gamma Phi (Phi^T Phi + eps I)^-1 (Z - Phi^T Theta).
RawUpdate horizon_update(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& window,
                         const Eigen::MatrixXd& z, const Eigen::MatrixXd& gamma, double eps);

template <int Outputs>
struct UpdateResult {
  ParamBlock<Outputs> block;
  bool skipped = false;
};

template <int Outputs>
UpdateResult<Outputs> projection_update(const ParamBlock<Outputs>& theta, const Regressor& phi,
                                        const typename ParamBlock<Outputs>::Output& z,
                                        const Mat4& gamma, double eps = kDefaultEps) {
  auto raw = projection_update(Eigen::MatrixXd(theta.packed()), Eigen::VectorXd(phi.phi),
                               Eigen::VectorXd(z), Eigen::MatrixXd(gamma), eps);
  return {ParamBlock<Outputs>(typename ParamBlock<Outputs>::Packed(raw.theta)), raw.skipped};
}

template <int Outputs>
UpdateResult<Outputs> horizon_update(const ParamBlock<Outputs>& theta,
                                     const Eigen::MatrixXd& window, const Eigen::MatrixXd& z,
                                     const Mat4& gamma, double eps = kDefaultEps) {
  auto raw = horizon_update(Eigen::MatrixXd(theta.packed()), window, z, Eigen::MatrixXd(gamma),
                            eps);
  return {ParamBlock<Outputs>(typename ParamBlock<Outputs>::Packed(raw.theta)), raw.skipped};
}

/// Theta_0 = [A^H B^H 0]^T.
ThetaState init_state_theta(const GaitParams& gait);

/// State blocks as init_state_theta, with D = 0, E = 1, F = 0.
ThetaOutput init_output_theta(const GaitParams& gait);

/// Sliding window of the last q (phi, z) pairs.
template <int Outputs>
class RegressorWindow {
 public:
  explicit RegressorWindow(int capacity) : capacity_(capacity) {
    if (capacity < 1) throw std::invalid_argument("RegressorWindow: capacity must be >= 1");
  }

  void push(const Regressor& phi, const typename ParamBlock<Outputs>::Output& z) {
    entries_.push_back({phi.phi, z});
    if (static_cast<int>(entries_.size()) > capacity_) entries_.pop_front();
  }

  int size() const { return static_cast<int>(entries_.size()); }
  int capacity() const { return capacity_; }

  Eigen::MatrixXd regressors() const {
    Eigen::MatrixXd m(kRegressorSize, size());
    for (int i = 0; i < size(); ++i) m.col(i) = entries_[static_cast<std::size_t>(i)].phi;
    return m;
  }

  Eigen::MatrixXd measurements() const {
    Eigen::MatrixXd m(size(), Outputs);
    for (int i = 0; i < size(); ++i) m.row(i) = entries_[static_cast<std::size_t>(i)].z.transpose();
    return m;
  }

 private:
  struct Entry {
    Vec4 phi;
    typename ParamBlock<Outputs>::Output z;
  };
  int capacity_;
  std::deque<Entry> entries_;
};

struct EstimatorOptions {
  double gamma = 0.2;  ///< Gamma = gamma * I
  double eps = kDefaultEps;
  int window = 1;  ///< q; 1 is the plain projection algorithm
  bool freeze_on_reject = true;
};

/// Per-leg online estimator.
///
/// `estimate()` always follows the update law. `accepted()` is the model used
/// for control: it follows the estimate only while the admissibility check
/// passes, and otherwise keeps the last admissible model.
template <int Outputs>
class OnlineEstimator {
 public:
  using Block = ParamBlock<Outputs>;
  using Admissible = std::function<bool(const Block&)>;

  struct Step {
    double residual = 0.0;  ///< |z - Theta_{k-1}^T phi| before the update
    bool skipped = false;
    bool accepted = true;
  };

  OnlineEstimator(const Block& initial, const EstimatorOptions& options)
      : options_(options),
        gamma_(options.gamma * Mat4::Identity()),
        estimate_(initial),
        accepted_(initial),
        window_(options.window) {}

  Step update(const Regressor& phi, const typename Block::Output& z,
              const Admissible& admissible = {}) {
    Step step;
    step.residual = (z - predict(estimate_, phi)).norm();
    UpdateResult<Outputs> result;
    if (options_.window <= 1) {
      result = projection_update(estimate_, phi, z, gamma_, options_.eps);
    } else {
      window_.push(phi, z);
      result = horizon_update(estimate_, window_.regressors(), window_.measurements(), gamma_,
                              options_.eps);
    }
    step.skipped = result.skipped;
    estimate_ = result.block;
    const bool ok = estimate_.finite() && (!admissible || admissible(estimate_));
    if (ok || !options_.freeze_on_reject) {
      accepted_ = estimate_;
    }
    step.accepted = ok;
    return step;
  }

  const Block& estimate() const { return estimate_; }
  const Block& accepted() const { return accepted_; }

 private:
  EstimatorOptions options_;
  Mat4 gamma_;
  Block estimate_;
  Block accepted_;
  RegressorWindow<Outputs> window_;
};

}  // namespace s2s::ident
