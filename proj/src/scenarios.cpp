#include <cmath>
#include <functional>
#include <map>

#include "s2s/errors.hpp"
#include "s2s/harness.hpp"

// Reduced-order analogs of the robot experiments. The physical disturbances
// cannot be replayed on a pendulum surrogate, so each one is mapped to a plant
// knob (see README, "Built-in scenarios"):
//   unmodeled robot dynamics -> lambda_scale and output-map gain
//   payload                  -> lambda_scale and output-map gain
//   leg mass and inertia     -> output map y = 0.8 u + 0.02
//   velocity estimate bias   -> meas_bias = [0, 0.4]
//   drag force F             -> accel_ext = F / 33.3 kg, ramped over 5 s
//   slope                    -> slope_kappa, SSP duration grows with step size

namespace s2s::harness {

namespace {

constexpr double kSagittalDragN = 100.0;
constexpr double kLateralDragN = 50.0;
constexpr double kDragRampSeconds = 5.0;

GaitParams gait(double z_com, double t_ssp) { return {z_com, t_ssp, 0.0, 9.81}; }

ScenarioConfig base(std::string name, std::string description, GaitParams g) {
  ScenarioConfig c;
  c.name = std::move(name);
  c.description = std::move(description);
  c.gait = g;
  c.n_steps = 200;
  c.seed = 1;
  return c;
}

ChannelConfig channel(std::string name, OrbitKind orbit, plant::RampSchedule v_des,
                      plant::PlantConfig pc) {
  ChannelConfig ch;
  ch.name = std::move(name);
  ch.orbit = orbit;
  ch.v_des = v_des;
  ch.plant = std::move(pc);
  return ch;
}

plant::PlantConfig robot_analog(const GaitParams& g, double lambda_scale, double e) {
  auto pc = plant::PlantConfig::hybrid(g);
  pc.lambda_scale = lambda_scale;
  pc.output_map.e = e;
  return pc;
}

int drag_ramp_steps(const GaitParams& g) {
  return static_cast<int>(std::ceil(kDragRampSeconds / g.period() - 1e-9));
}

ScenarioConfig velocity_sagittal() {
  auto c = base("velocity_sagittal", "P1 sagittal velocity tracking, z=0.75 m, T=0.3 s",
                gait(0.75, 0.3));
  c.channels.push_back(channel("sagittal", OrbitKind::P1, {0.0, 0.8, 40},
                               robot_analog(c.gait, 0.92, 0.9)));
  return c;
}

ScenarioConfig velocity_lateral() {
  auto c = base("velocity_lateral", "P2 lateral velocity tracking, z=0.65 m, T=0.4 s",
                gait(0.65, 0.4));
  c.channels.push_back(channel("lateral", OrbitKind::P2, {0.0, 0.3, 30},
                               robot_analog(c.gait, 0.92, 0.9)));
  return c;
}

ScenarioConfig unknown_load() {
  auto c = base("unknown_load", "unmodeled payload, 3D walking (sagittal P1, lateral P2)",
                gait(0.75, 0.3));
  c.channels.push_back(channel("sagittal", OrbitKind::P1, {0.0, 1.0, 40},
                               robot_analog(c.gait, 0.88, 0.92)));
  c.channels.push_back(channel("lateral", OrbitKind::P2, plant::RampSchedule::constant(0.0),
                               robot_analog(c.gait, 0.88, 0.92)));
  return c;
}

ScenarioConfig mass_inertia() {
  auto c = base("mass_inertia", "leg mass/inertia change as step-size tracking error",
                gait(0.75, 0.3));
  auto pc = plant::PlantConfig::hybrid(c.gait);
  pc.output_map.e = 0.8;
  pc.output_map.f = 0.02;
  c.channels.push_back(channel("sagittal", OrbitKind::P1, {0.0, 0.5, 10}, pc));
  return c;
}

ScenarioConfig state_bias() {
  auto c = base("state_bias", "constant 0.4 m/s bias on the velocity estimate",
                gait(0.75, 0.3));
  auto pc = plant::PlantConfig::linear_hlip(c.gait);
  pc.meas_bias = Vec2{0.0, 0.4};
  c.channels.push_back(channel("sagittal", OrbitKind::P1, {0.0, 0.5, 10}, pc));
  return c;
}

ScenarioConfig drag() {
  auto c = base("drag", "drag force ramped over 5 s while stepping in place",
                gait(0.75, 0.3));
  const int ramp = drag_ramp_steps(c.gait);
  auto sag = plant::PlantConfig::hybrid(c.gait);
  sag.accel_ext = {0.0, kSagittalDragN / plant::kDefaultRobotMass, ramp};
  auto lat = plant::PlantConfig::hybrid(c.gait);
  lat.accel_ext = {0.0, kLateralDragN / plant::kDefaultRobotMass, ramp};
  c.channels.push_back(channel("sagittal", OrbitKind::P1, plant::RampSchedule::constant(0.0), sag));
  c.channels.push_back(channel("lateral", OrbitKind::P2, plant::RampSchedule::constant(0.0), lat));
  return c;
}

ScenarioConfig slope(std::string name, std::string description, double kappa) {
  auto c = base(std::move(name), std::move(description), gait(0.75, 0.3));
  auto pc = plant::PlantConfig::hybrid(c.gait);
  pc.slope_kappa = kappa;
  c.channels.push_back(channel("sagittal", OrbitKind::P1, {0.0, 0.5, 20}, pc));
  return c;
}

const std::map<std::string, std::function<ScenarioConfig()>>& registry() {
  static const std::map<std::string, std::function<ScenarioConfig()>> r = {
      {"velocity_sagittal", velocity_sagittal},
      {"velocity_lateral", velocity_lateral},
      {"unknown_load", unknown_load},
      {"mass_inertia", mass_inertia},
      {"state_bias", state_bias},
      {"drag", drag},
      // Uphill the swing foot strikes earlier the longer the step; downhill later.
      {"slope_up", [] { return slope("slope_up", "uphill, impact earlier for longer steps", -0.1); }},
      {"slope_down",
       [] { return slope("slope_down", "downhill, impact later for longer steps", 0.1); }},
  };
  return r;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  return names;
}

ScenarioConfig builtin_scenario(std::string_view name, ControllerKind controller) {
  const auto it = registry().find(std::string(name));
  if (it == registry().end())
    throw ConfigError("scenario", "unknown built-in scenario '" + std::string(name) + "'");
  auto c = it->second();
  c.controller = controller;
  return c;
}

std::vector<ScenarioConfig> builtin_scenarios() {
  std::vector<ScenarioConfig> out;
  for (const auto& name : builtin_scenario_names()) {
    for (auto k : kAllControllers) out.push_back(builtin_scenario(name, k));
  }
  return out;
}

}  // namespace s2s::harness
