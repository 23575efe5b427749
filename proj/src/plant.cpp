#include "s2s/plant.hpp"

#include <algorithm>
#include <stdexcept>

namespace s2s::plant {

double RampSchedule::at(int step) const {
  if (ramp_steps <= 0 || step >= ramp_steps) return end_value;
  if (step <= 0) return start_value;
  const double frac = static_cast<double>(step) / static_cast<double>(ramp_steps);
  return start_value + frac * (end_value - start_value);
}

double eval_schedule(const RampSchedule& s, int step) { return s.at(step); }

PlantConfig PlantConfig::linear_hlip(const GaitParams& gait) {
  const auto m = hlip::s2s_matrices(gait);
  PlantConfig cfg;
  cfg.kind = PlantKind::Linear;
  cfg.gait = gait;
  cfg.true_a = m.a;
  cfg.true_b = m.b;
  cfg.true_c = Vec2::Zero();
  return cfg;
}

PlantConfig PlantConfig::hybrid(const GaitParams& gait) {
  PlantConfig cfg = linear_hlip(gait);
  cfg.kind = PlantKind::HybridLip;
  return cfg;
}

void PlantConfig::validate() const {
  gait.validate();
  auto finite = [](const auto& m) { return m.allFinite(); };
  if (!finite(true_a) || !finite(true_b) || !finite(true_c))
    throw std::invalid_argument("plant: true model is not finite");
  if (!(output_map.e > 0.0)) throw std::invalid_argument("plant: output_map.e must be > 0");
  if (!finite(output_map.d) || !std::isfinite(output_map.f))
    throw std::invalid_argument("plant: output map is not finite");
  if (!(lambda_scale > 0.0)) throw std::invalid_argument("plant: lambda_scale must be > 0");
  if (!std::isfinite(slope_kappa)) throw std::invalid_argument("plant: slope_kappa not finite");
  if (accel_ext.ramp_steps < 0) throw std::invalid_argument("plant: ramp_steps must be >= 0");
  if ((process_noise_sigma.array() < 0.0).any() || (meas_noise_sigma.array() < 0.0).any())
    throw std::invalid_argument("plant: noise sigma must be >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("plant: dt must be > 0");
}

Plant::Plant(PlantConfig config) : config_(std::move(config)), rng_(config_.seed) {
  config_.validate();
}

Vec2 Plant::draw(const Vec2& sigma) {
  Vec2 out = Vec2::Zero();
  // Only consume the stream for active channels so that enabling one noise
  // source does not reshuffle the other.
  for (int i = 0; i < 2; ++i) {
    if (sigma(i) > 0.0) out(i) = sigma(i) * normal_(rng_);
  }
  return out;
}

ComState Plant::measure(const ComState& x_true) {
  return ComState::from(x_true.vec() + config_.meas_bias + draw(config_.meas_noise_sigma));
}

PlantOutput Plant::step(const ComState& x_true, double u_cmd, int k_step) {
  PlantOutput out = config_.kind == PlantKind::Linear ? linear_step(x_true, u_cmd, k_step)
                                                      : hybrid_step(x_true, u_cmd, k_step);
  const auto& x = out.x_true_next;
  if (!x.finite() || std::abs(x.p) > kFallThreshold || std::abs(x.v) > kFallThreshold)
    out.status = PlantStatus::Fall;
  out.x_meas_next = measure(out.x_true_next);
  return out;
}

PlantOutput Plant::linear_step(const ComState& x_true, double u_cmd, int k_step) {
  PlantOutput out;
  out.y_actual = config_.output_map.apply(x_true, u_cmd);
  out.duration = config_.gait.period();
  const Vec2 w = Vec2{0.0, config_.accel_ext.at(k_step) * out.duration} +
                 draw(config_.process_noise_sigma);
  out.x_true_next = ComState::from(config_.true_a * x_true.vec() +
                                   config_.true_b * out.y_actual + config_.true_c + w);
  return out;
}

PlantOutput Plant::hybrid_step(const ComState& x_true, double u_cmd, int k_step) {
  const auto& gait = config_.gait;
  PlantOutput out;
  out.y_actual = config_.output_map.apply(x_true, u_cmd);
  const double t_ssp = std::max(gait.t_ssp + config_.slope_kappa * u_cmd, kMinSspDuration);
  out.duration = t_ssp + gait.t_dsp;

  Vec2 s{x_true.p - out.y_actual, x_true.v};
  s(0) += s(1) * gait.t_dsp;
  const double lambda = config_.lambda_scale * gait.lambda();
  s = hlip::integrate_ssp(s, lambda, t_ssp, config_.accel_ext.at(k_step), config_.dt);
  out.x_true_next = ComState::from(s + draw(config_.process_noise_sigma));
  return out;
}

}  // namespace s2s::plant
