#include "s2s/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <set>
#include <thread>

#include "s2s/config.hpp"
#include "s2s/errors.hpp"
#include "s2s/hlip.hpp"
#include "s2s/stepping.hpp"

namespace s2s::harness {

std::string_view to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::BaselineHlip:
      return "baseline_hlip";
    case ControllerKind::AdaptiveState:
      return "adaptive_state";
    case ControllerKind::AdaptiveOutput:
      return "adaptive_output";
  }
  return "unknown";
}

ControllerKind parse_controller(std::string_view name) {
  for (auto k : kAllControllers) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("controller", "unknown controller '" + std::string(name) +
                                      "' (expected baseline_hlip, adaptive_state or "
                                      "adaptive_output)");
}

std::uint64_t name_hash(std::string_view name) {
  // FNV-1a, stable across platforms and runs
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void ScenarioConfig::validate() const {
  if (schema_version != kSchemaVersion)
    throw ConfigError("schema_version", "unsupported schema version " +
                                            std::to_string(schema_version));
  if (n_steps < 1) throw ConfigError("n_steps", "must be >= 1");
  try {
    gait.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("gait", e.what());
  }
  if (!(estimator.gamma > 0.0) || !std::isfinite(estimator.gamma))
    throw ConfigError("estimator.gamma", "must be > 0");
  if (!(estimator.eps >= 0.0)) throw ConfigError("estimator.eps", "must be >= 0");
  if (estimator.window < 1) throw ConfigError("estimator.window", "must be >= 1");
  if (!(gains.controllability_tol > 0.0))
    throw ConfigError("gains.controllability_tol", "must be > 0");
  if (!(gains.lqr_r > 0.0)) throw ConfigError("gains.lqr_r", "must be > 0");
  {
    const Mat2& q = gains.lqr_q;
    Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (q + q.transpose()));
    if (!q.allFinite() || !q.isApprox(q.transpose(), 1e-12) ||
        es.eigenvalues().minCoeff() < -1e-12)
      throw ConfigError("gains.lqr_q", "must be symmetric positive semidefinite");
  }
  if (!(gains.riccati_tol > 0.0)) throw ConfigError("gains.riccati_tol", "must be > 0");
  if (gains.riccati_max_iter < 1) throw ConfigError("gains.riccati_max_iter", "must be >= 1");
  if (!(u_max > 0.0)) throw ConfigError("u_max", "must be > 0");
  if (!(r_threshold >= 0.0)) throw ConfigError("r_threshold", "must be >= 0");
  if (!(metrics.steady_state_fraction > 0.0 && metrics.steady_state_fraction <= 1.0))
    throw ConfigError("metrics.steady_state_fraction", "must be in (0, 1]");
  if (!(metrics.settle_band > 0.0)) throw ConfigError("metrics.settle_band", "must be > 0");
  if (channels.empty() || channels.size() > 2)
    throw ConfigError("channels", "expected 1 or 2 channels, got " +
                                      std::to_string(channels.size()));
  std::set<std::string> names;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const auto& ch = channels[i];
    const std::string key = "channels." + std::to_string(i);
    if (ch.name.empty() || !names.insert(ch.name).second)
      throw ConfigError(key + ".name", "channel names must be non-empty and unique");
    if (!ch.x0.finite()) throw ConfigError(key + ".x0", "must be finite");
    if (!std::isfinite(ch.u_offset)) throw ConfigError(key + ".u_offset", "must be finite");
    if (ch.v_des.ramp_steps < 0) throw ConfigError(key + ".v_des.ramp_steps", "must be >= 0");
    try {
      auto pc = ch.plant;
      pc.gait = gait;
      pc.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key + ".plant", e.what());
    }
  }
}

bool EpisodeResult::fell() const {
  return std::any_of(channels.begin(), channels.end(),
                     [](const ChannelResult& c) { return c.metrics.fell; });
}

Metrics compute_metrics(const std::vector<StepRecord>& records, const MetricOptions& options) {
  Metrics m;
  m.steps = static_cast<int>(records.size());
  if (records.empty()) return m;
  m.fell = records.back().status == StepStatus::Fall;

  const auto n = records.size();
  const auto window = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(options.steady_state_fraction * static_cast<double>(n))));
  const auto first = n - std::min(window, n);

  double vel = 0.0, step = 0.0, cmd = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    const auto& r = records[i];
    vel += std::abs(r.v_walk - r.v_des);
    step += std::abs(r.y_actual - r.u_star);
    cmd += std::abs(r.u_cmd - r.u_star);
  }
  const auto count = static_cast<double>(n - first);
  m.ss_velocity_error = vel / count;
  m.ss_step_error = step / count;
  m.ss_command_error = cmd / count;

  m.max_velocity_error = 0.0;
  long last_out = -1;
  double sq = 0.0;
  int residuals = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = records[i];
    const double err = std::abs(r.v_walk - r.v_des);
    m.max_velocity_error = std::max(m.max_velocity_error, err);
    if (!(err <= options.settle_band)) last_out = static_cast<long>(i);
    if (std::isfinite(r.residual)) {
      sq += r.residual * r.residual;
      ++residuals;
    }
    if (r.saturated) ++m.saturated_steps;
  }
  m.settling_step = last_out + 1 < static_cast<long>(n) ? static_cast<int>(last_out + 1) : -1;
  if (m.fell) m.settling_step = -1;
  if (residuals > 0) m.prediction_rms = std::sqrt(sq / residuals);
  return m;
}

namespace {

template <int Outputs>
ident::ParamBlock<Outputs> initial_block(const GaitParams& gait) {
  if constexpr (Outputs == 2) {
    return ident::init_state_theta(gait);
  } else {
    return ident::init_output_theta(gait);
  }
}

template <int Outputs>
void store_theta(const ident::ParamBlock<Outputs>& block, StepRecord& rec) {
  rec.theta.fill(kNaN);
  const auto flat = block.flatten();
  std::copy(flat.begin(), flat.end(), rec.theta.begin());
}

template <int Outputs>
ChannelResult run_channel(const ScenarioConfig& cfg, const ChannelConfig& ch) {
  using Block = ident::ParamBlock<Outputs>;
  using Estimator = ident::OnlineEstimator<Outputs>;

  const bool adaptive = cfg.controller != ControllerKind::BaselineHlip;
  const bool p2 = ch.orbit == OrbitKind::P2;
  const double period = cfg.gait.period();

  plant::PlantConfig pc = ch.plant;
  pc.gait = cfg.gait;
  // Keyed by channel name so that adding or removing another channel leaves
  // this channel's noise stream unchanged.
  pc.seed = mix_seed(mix_seed(cfg.seed, name_hash(ch.name)), ch.plant.seed);
  plant::Plant plant(pc);

  const Block init = initial_block<Outputs>(cfg.gait);
  PerLeg<Estimator> est{Estimator(init, cfg.estimator), Estimator(init, cfg.estimator)};
  const auto admissible = [&](const Block& b) {
    return gains::controllability_ok(b.a(), b.b(), cfg.gains.controllability_tol);
  };
  const auto model_leg = [p2](Stance s) { return p2 ? s : Stance::Left; };

  PerLeg<gains::FeedbackGain> gain =
      PerLeg<gains::FeedbackGain>::both(gains::synthesize(init.a(), init.b(), cfg.gains));
  OrbitTarget target = hlip::nominal_orbit(cfg.gait, ch.v_des.at(0), ch.orbit, ch.u_offset);

  ChannelResult result;
  result.channel = ch.name;
  result.orbit = ch.orbit;
  result.records.reserve(static_cast<std::size_t>(cfg.n_steps));

  ComState x_true = ch.x0;
  ComState x_meas = plant.measure(x_true);
  ComState x_meas_prev;
  double u_prev = 0.0;
  double y_prev = 0.0;
  double disp_prev = 0.0;
  double dur_prev = 0.0;
  Stance stance = Stance::Left;
  Stance stance_prev = Stance::Left;
  long seq = 0;

  for (int k = 0; k < cfg.n_steps; ++k) {
    StepRecord rec;
    rec.step = k;
    rec.stance = stance;
    rec.x_meas = x_meas;
    rec.x_true = x_true;
    rec.v_des = ch.v_des.at(k);

    if (adaptive) {
      if (k >= 1) {
        const auto phi = ident::make_regressor(x_meas_prev, u_prev);
        typename Block::Output z;
        z.template head<2>() = x_meas.vec();
        if constexpr (Outputs == 3) z(2) = y_prev;
        const auto st = est[model_leg(stance_prev)].update(phi, z, admissible);
        rec.residual = st.residual;
        rec.update_skipped = st.skipped;
        rec.model_rejected = !st.accepted;
        rec.seq_update = seq++;
      }

      for (Stance leg : {Stance::Left, Stance::Right}) {
        if (!p2 && leg == Stance::Right) {
          gain.right = gain.left;
          continue;
        }
        const auto& m = est[leg].accepted();
        try {
          gain[leg] = gains::synthesize(m.a(), m.b(), cfg.gains);
        } catch (const std::runtime_error&) {
          rec.gain_fallback = true;
        }
      }
      rec.seq_gain = seq++;

      const ident::LegModels<Outputs> models{est.left.accepted(), est.right.accepted()};
      try {
        target = stepping::make_target(ch.orbit, rec.v_des, period, ch.u_offset, models);
      } catch (const SingularModelError&) {
        rec.target_fallback = true;
        target.v_des = rec.v_des;
        target.u_star = stepping::desired_step_sizes(ch.orbit, rec.v_des, period, ch.u_offset);
      }
      rec.seq_target = seq++;
    } else {
      target = hlip::nominal_orbit(cfg.gait, rec.v_des, ch.orbit, ch.u_offset);
      rec.seq_target = seq++;
    }

    double u = 0.0;
    if (!adaptive) {
      u = hlip::baseline_controller(x_meas, target.x_star[stance], target.u_star[stance],
                                    gain[stance].k);
    } else if (cfg.controller == ControllerKind::AdaptiveOutput) {
      if constexpr (Outputs == 3) {
        try {
          stepping::OutputFeedforward ff;
          if (p2) {
            ff = stepping::output_feedforward_p2({est.left.accepted(), est.right.accepted()},
                                                 gain, target.u_star, cfg.r_threshold)[stance];
          } else {
            ff = stepping::output_feedforward(est.left.accepted(), gain.left,
                                              target.u_star.left, cfg.r_threshold);
          }
          u = stepping::output_tracking_controller(x_meas, gain[stance], ff,
                                                   target.u_star[stance]);
          rec.k_f = ff.k_f;
          rec.b_f = ff.b_f;
        } catch (const std::runtime_error&) {
          rec.feedforward_fallback = true;
          u = stepping::state_tracking_controller(x_meas, target, gain, stance);
        }
      }
    } else {
      u = stepping::state_tracking_controller(x_meas, target, gain, stance);
    }
    rec.seq_control = seq++;

    const auto sat = stepping::saturate_step(u, cfg.u_max);
    const auto out = plant.step(x_true, sat.value, k);

    rec.u_ctrl = u;
    rec.u_cmd = sat.value;
    rec.saturated = sat.saturated;
    rec.y_actual = out.y_actual;
    rec.duration = out.duration;
    rec.u_star = target.u_star[stance];
    rec.x_star = target.x_star[stance];
    rec.k = gain[stance].k;
    store_theta(est[model_leg(stance)].accepted(), rec);

    const double disp = out.x_true_next.p - x_true.p + out.y_actual;
    rec.v_step = disp / out.duration;
    rec.v_walk = (p2 && k >= 1) ? (disp + disp_prev) / (out.duration + dur_prev) : rec.v_step;

    if (out.status == plant::PlantStatus::Fall) {
      rec.status = StepStatus::Fall;
      result.records.push_back(rec);
      break;
    }
    result.records.push_back(rec);

    x_meas_prev = x_meas;
    u_prev = sat.value;
    y_prev = out.y_actual;
    disp_prev = disp;
    dur_prev = out.duration;
    stance_prev = stance;
    stance = other(stance);
    x_true = out.x_true_next;
    x_meas = out.x_meas_next;
  }

  result.metrics = compute_metrics(result.records, cfg.metrics);
  return result;
}

template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

EpisodeResult run_episode(const ScenarioConfig& config) {
  config.validate();
  EpisodeResult result;
  result.scenario = config.name;
  result.controller = config.controller;
  for (std::size_t i = 0; i < config.channels.size(); ++i) {
    if (config.controller == ControllerKind::AdaptiveOutput) {
      result.channels.push_back(run_channel<3>(config, config.channels[i]));
    } else {
      result.channels.push_back(run_channel<2>(config, config.channels[i]));
    }
  }
  return result;
}

std::vector<EpisodeResult> compare(const std::vector<ScenarioConfig>& configs, int jobs) {
  if (configs.empty()) throw std::invalid_argument("compare: no configurations given");
  for (const auto& c : configs) c.validate();
  std::vector<EpisodeResult> results(configs.size());
  parallel_for(configs.size(), jobs, [&](std::size_t i) { results[i] = run_episode(configs[i]); });
  return results;
}

std::vector<SweepCell> sweep(const ScenarioConfig& base, const std::string& path,
                             const std::vector<double>& values, int jobs) {
  if (values.empty()) throw std::invalid_argument("sweep: no values given");
  std::vector<SweepCell> cells(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    cells[i].value = values[i];
    cells[i].config = with_parameter(base, path, values[i]);
    if (path != "seed")
      cells[i].config.seed = mix_seed(base.seed, std::bit_cast<std::uint64_t>(values[i]));
    cells[i].config.validate();
  }
  parallel_for(cells.size(), jobs,
               [&](std::size_t i) { cells[i].result = run_episode(cells[i].config); });
  return cells;
}

}  // namespace s2s::harness
