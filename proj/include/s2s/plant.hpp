#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "s2s/hlip.hpp"
#include "s2s/types.hpp"

namespace s2s::plant {

inline constexpr double kFallThreshold = 1e3;
inline constexpr double kDefaultRobotMass = 33.3;  // kg, drag force -> acceleration
inline constexpr double kMinSspDuration = 1e-3;

/// Piecewise-linear ramp from start_value to end_value over ramp_steps,
/// then held.
struct RampSchedule {
  double start_value = 0.0;
  double end_value = 0.0;
  int ramp_steps = 0;

  static RampSchedule constant(double value) { return {value, value, 0}; }
  double at(int step) const;
};

double eval_schedule(const RampSchedule& s, int step);

/// Realized step size y = d x + e u_cmd + f. Stands in for low-level
/// tracking error of the swing foot.
struct OutputMap {
  RowVec2 d = RowVec2::Zero();
  double e = 1.0;
  double f = 0.0;

  double apply(const ComState& x, double u_cmd) const { return d.dot(x.vec()) + e * u_cmd + f; }
};

enum class PlantKind { Linear, HybridLip };

constexpr std::string_view to_string(PlantKind k) {
  return k == PlantKind::Linear ? "linear" : "hybrid_lip";
}

/// Ground-truth surrogate for the robot and its low-level controller.
struct PlantConfig {
  PlantKind kind = PlantKind::HybridLip;
  // Linear plant: x+ = A x + B y + C + w.
  Mat2 true_a = Mat2::Identity();
  Vec2 true_b = Vec2::Zero();
  Vec2 true_c = Vec2::Zero();
  // Hybrid plant; also supplies the step period for the linear plant.
  GaitParams gait;
  double lambda_scale = 1.0;
  RampSchedule accel_ext;  ///< m/s^2, external horizontal acceleration (F / m)
  Vec2 meas_bias = Vec2::Zero();
  OutputMap output_map;
  double slope_kappa = 0.0;  ///< s/m, SSP duration change per metre of commanded step
  Vec2 process_noise_sigma = Vec2::Zero();
  Vec2 meas_noise_sigma = Vec2::Zero();
  std::uint64_t seed = 0;
  double dt = hlip::kDefaultDt;

  /// Linear plant whose true model is the H-LIP of `gait` (C = 0).
  static PlantConfig linear_hlip(const GaitParams& gait);
  static PlantConfig hybrid(const GaitParams& gait);

  void validate() const;
};

enum class PlantStatus { Ok, Fall };

struct PlantOutput {
  ComState x_true_next;
  ComState x_meas_next;
  double y_actual = 0.0;
  double duration = 0.0;  ///< realized step duration (s)
  PlantStatus status = PlantStatus::Ok;
};

/// Owns the RNG stream of one plant instance; one per episode channel.
class Plant {
 public:
  explicit Plant(PlantConfig config);

  const PlantConfig& config() const { return config_; }

  /// x_true + bias + measurement noise.
  ComState measure(const ComState& x_true);

  /// Advances one walking step from pre-impact state x_true under u_cmd.
  /// k_step indexes the disturbance schedule.
  PlantOutput step(const ComState& x_true, double u_cmd, int k_step);

 private:
  PlantOutput linear_step(const ComState& x_true, double u_cmd, int k_step);
  PlantOutput hybrid_step(const ComState& x_true, double u_cmd, int k_step);
  Vec2 draw(const Vec2& sigma);

  PlantConfig config_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace s2s::plant
