#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "s2s/gains.hpp"
#include "s2s/plant.hpp"
#include "s2s/s2s_id.hpp"
#include "s2s/types.hpp"

namespace s2s::harness {

inline constexpr int kSchemaVersion = 1;
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class ControllerKind { BaselineHlip, AdaptiveState, AdaptiveOutput };

std::string_view to_string(ControllerKind k);
ControllerKind parse_controller(std::string_view name);  // throws ConfigError
constexpr std::array<ControllerKind, 3> kAllControllers = {
    ControllerKind::BaselineHlip, ControllerKind::AdaptiveState, ControllerKind::AdaptiveOutput};

struct ChannelConfig {
  std::string name = "sagittal";
  OrbitKind orbit = OrbitKind::P1;
  double u_offset = 0.2;  ///< P2 orbit selector, m
  plant::RampSchedule v_des;
  plant::PlantConfig plant;  ///< plant.gait is overwritten by the scenario gait
  ComState x0;               ///< initial true pre-impact state
};

struct MetricOptions {
  double steady_state_fraction = 0.2;
  double settle_band = 0.05;  ///< m/s
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  std::string name = "custom";
  std::string description;
  GaitParams gait;
  ControllerKind controller = ControllerKind::AdaptiveState;
  ident::EstimatorOptions estimator;
  gains::GainOptions gains;
  double u_max = 0.8;
  double r_threshold = 1e-6;
  int n_steps = 200;
  std::uint64_t seed = 0;
  MetricOptions metrics;
  std::vector<ChannelConfig> channels;

  /// Throws ConfigError naming the first invalid entry.
  void validate() const;
};

enum class StepStatus { Ok, Fall };

/// One completed walking step of one channel.
struct StepRecord {
  int step = 0;
  Stance stance = Stance::Left;
  ComState x_meas;
  ComState x_true;
  double u_ctrl = 0.0;  ///< controller output before saturation
  double u_cmd = 0.0;   ///< applied (saturated) command
  bool saturated = false;
  double y_actual = 0.0;
  double duration = 0.0;
  double v_step = 0.0;  ///< COM displacement over the step / its duration
  double v_walk = 0.0;  ///< v_step for P1, stride average for P2
  double v_des = 0.0;
  double u_star = 0.0;
  ComState x_star;
  RowVec2 k = RowVec2::Zero();
  double k_f = kNaN;
  double b_f = kNaN;
  std::array<double, 12> theta{};  ///< accepted model, d/e/f NaN for state form
  double residual = kNaN;          ///< prediction error of the update at this step
  bool update_skipped = false;
  bool model_rejected = false;
  bool gain_fallback = false;
  bool target_fallback = false;
  bool feedforward_fallback = false;
  // Phase ordering within the episode; -1 when the phase did not run.
  long seq_update = -1;
  long seq_gain = -1;
  long seq_target = -1;
  long seq_control = -1;
  StepStatus status = StepStatus::Ok;
};

struct Metrics {
  double ss_velocity_error = kNaN;  ///< mean |v_walk - v_des| over the steady-state window
  int settling_step = -1;           ///< first step after which |v_walk - v_des| stays in band
  double max_velocity_error = kNaN;
  double ss_step_error = kNaN;  ///< mean |y_actual - u*| over the steady-state window
  double ss_command_error = kNaN;  ///< mean |u_cmd - u*| over the steady-state window
  double prediction_rms = kNaN;
  int saturated_steps = 0;
  int steps = 0;
  bool fell = false;
};

struct ChannelResult {
  std::string channel;
  OrbitKind orbit = OrbitKind::P1;
  std::vector<StepRecord> records;
  Metrics metrics;
};

struct EpisodeResult {
  std::string scenario;
  ControllerKind controller = ControllerKind::AdaptiveState;
  std::vector<ChannelResult> channels;

  bool fell() const;
};

Metrics compute_metrics(const std::vector<StepRecord>& records, const MetricOptions& options);

/// Runs every channel of the scenario. Channels are independent.
/// Throws ConfigError on an invalid configuration before stepping.
EpisodeResult run_episode(const ScenarioConfig& config);

/// Names of the built-in scenarios.
std::vector<std::string> builtin_scenario_names();

/// Built-in scenario with the given controller (default adaptive_state).
/// Throws ConfigError for an unknown name.
ScenarioConfig builtin_scenario(std::string_view name,
                                ControllerKind controller = ControllerKind::AdaptiveState);

/// Every built-in scenario in each of the three controller variants.
std::vector<ScenarioConfig> builtin_scenarios();

/// Runs the configs with the same seed and returns results in input order.
/// jobs > 1 runs episodes concurrently. Throws std::invalid_argument on an
/// empty list.
std::vector<EpisodeResult> compare(const std::vector<ScenarioConfig>& configs, int jobs = 1);

struct SweepCell {
  double value = 0.0;
  ScenarioConfig config;
  EpisodeResult result;
};

/// Evaluates base with the numeric parameter at `path` (dotted config path,
/// e.g. "estimator.gamma" or "channels.0.plant.slope_kappa") set to each value.
/// Each cell's seed is derived from the base seed and the value itself.
std::vector<SweepCell> sweep(const ScenarioConfig& base, const std::string& path,
                             const std::vector<double>& values, int jobs = 1);

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t name_hash(std::string_view name);

}  // namespace s2s::harness
