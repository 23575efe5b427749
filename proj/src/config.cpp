#include "s2s/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "s2s/errors.hpp"

namespace s2s::harness {

using Json = nlohmann::ordered_json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

/// Reads one JSON object, remembering which keys were consumed so that
/// leftovers can be reported as unknown.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const Json& at(const std::string& key) { return j_.at(key); }
  std::string key(const std::string& k) const { return join(path_, k); }

  void number(const std::string& k, double& out) {
    if (!has(k)) return;
    const auto& v = at(k);
    if (!v.is_number()) throw ConfigError(key(k), "expected a number");
    out = v.get<double>();
  }

  void integer(const std::string& k, int& out) {
    if (!has(k)) return;
    const auto& v = at(k);
    if (!v.is_number_integer()) throw ConfigError(key(k), "expected an integer");
    out = v.get<int>();
  }

  void unsigned_integer(const std::string& k, std::uint64_t& out) {
    if (!has(k)) return;
    const auto& v = at(k);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
      throw ConfigError(key(k), "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void boolean(const std::string& k, bool& out) {
    if (!has(k)) return;
    const auto& v = at(k);
    if (!v.is_boolean()) throw ConfigError(key(k), "expected true or false");
    out = v.get<bool>();
  }

  void string(const std::string& k, std::string& out) {
    if (!has(k)) return;
    const auto& v = at(k);
    if (!v.is_string()) throw ConfigError(key(k), "expected a string");
    out = v.get<std::string>();
  }

  template <class Vec>
  void vector2(const std::string& k, Vec& out) {
    if (!has(k)) return;
    const auto& v = at(k);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw ConfigError(key(k), "expected an array of 2 numbers");
    out(0) = v[0].get<double>();
    out(1) = v[1].get<double>();
  }

  void matrix2(const std::string& k, Mat2& out) {
    if (!has(k)) return;
    const auto& v = at(k);
    bool ok = v.is_array() && v.size() == 2;
    for (std::size_t r = 0; ok && r < 2; ++r) {
      ok = v[r].is_array() && v[r].size() == 2 && v[r][0].is_number() && v[r][1].is_number();
    }
    if (!ok) throw ConfigError(key(k), "expected a 2x2 array of numbers");
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) out(r, c) = v[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    }
  }

  Reader child(const std::string& k) { return Reader(at(k), key(k)); }

  void finish() const {
    for (const auto& [k, _] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError(key(k), "unknown key");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Json vec_json(double a, double b) { return Json::array({a, b}); }

Json mat_json(const Mat2& m) {
  return Json::array({vec_json(m(0, 0), m(0, 1)), vec_json(m(1, 0), m(1, 1))});
}

Json ramp_json(const plant::RampSchedule& s) {
  Json j;
  j["start_value"] = s.start_value;
  j["end_value"] = s.end_value;
  j["ramp_steps"] = s.ramp_steps;
  return j;
}

void read_ramp(Reader r, plant::RampSchedule& s) {
  r.number("start_value", s.start_value);
  r.number("end_value", s.end_value);
  r.integer("ramp_steps", s.ramp_steps);
  r.finish();
}

Json plant_json(const plant::PlantConfig& p) {
  Json j;
  j["kind"] = std::string(to_string(p.kind));
  j["true_a"] = mat_json(p.true_a);
  j["true_b"] = vec_json(p.true_b(0), p.true_b(1));
  j["true_c"] = vec_json(p.true_c(0), p.true_c(1));
  j["lambda_scale"] = p.lambda_scale;
  j["accel_ext"] = ramp_json(p.accel_ext);
  j["meas_bias"] = vec_json(p.meas_bias(0), p.meas_bias(1));
  j["output_map"] = {{"d", vec_json(p.output_map.d(0), p.output_map.d(1))},
                     {"e", p.output_map.e},
                     {"f", p.output_map.f}};
  j["slope_kappa"] = p.slope_kappa;
  j["process_noise_sigma"] = vec_json(p.process_noise_sigma(0), p.process_noise_sigma(1));
  j["meas_noise_sigma"] = vec_json(p.meas_noise_sigma(0), p.meas_noise_sigma(1));
  j["seed"] = p.seed;
  j["dt"] = p.dt;
  return j;
}

void read_plant(Reader r, plant::PlantConfig& p, const GaitParams& gait) {
  std::string kind(to_string(p.kind));
  r.string("kind", kind);
  if (kind == "linear") {
    p.kind = plant::PlantKind::Linear;
  } else if (kind == "hybrid_lip") {
    p.kind = plant::PlantKind::HybridLip;
  } else {
    throw ConfigError(r.key("kind"), "expected 'linear' or 'hybrid_lip'");
  }
  // The true model defaults to the H-LIP of the scenario gait.
  const auto hl = plant::PlantConfig::linear_hlip(gait);
  p.true_a = hl.true_a;
  p.true_b = hl.true_b;
  p.true_c = hl.true_c;
  r.matrix2("true_a", p.true_a);
  r.vector2("true_b", p.true_b);
  r.vector2("true_c", p.true_c);
  r.number("lambda_scale", p.lambda_scale);
  if (r.has("accel_ext")) read_ramp(r.child("accel_ext"), p.accel_ext);
  r.vector2("meas_bias", p.meas_bias);
  if (r.has("output_map")) {
    Reader o = r.child("output_map");
    o.vector2("d", p.output_map.d);
    o.number("e", p.output_map.e);
    o.number("f", p.output_map.f);
    o.finish();
  }
  r.number("slope_kappa", p.slope_kappa);
  r.vector2("process_noise_sigma", p.process_noise_sigma);
  r.vector2("meas_noise_sigma", p.meas_noise_sigma);
  r.unsigned_integer("seed", p.seed);
  r.number("dt", p.dt);
  r.finish();
}

}  // namespace

Json to_json(const ScenarioConfig& c) {
  Json j;
  j["schema_version"] = c.schema_version;
  j["name"] = c.name;
  j["description"] = c.description;
  j["controller"] = std::string(to_string(c.controller));
  j["n_steps"] = c.n_steps;
  j["seed"] = c.seed;
  j["gait"] = {{"z_com", c.gait.z_com},
               {"t_ssp", c.gait.t_ssp},
               {"t_dsp", c.gait.t_dsp},
               {"gravity", c.gait.gravity}};
  j["estimator"] = {{"gamma", c.estimator.gamma},
                    {"eps", c.estimator.eps},
                    {"window", c.estimator.window},
                    {"freeze_on_reject", c.estimator.freeze_on_reject}};
  j["gains"] = {{"method", std::string(gains::to_string(c.gains.method))},
                {"lqr_q", mat_json(c.gains.lqr_q)},
                {"lqr_r", c.gains.lqr_r},
                {"controllability_tol", c.gains.controllability_tol},
                {"riccati_tol", c.gains.riccati_tol},
                {"riccati_max_iter", c.gains.riccati_max_iter}};
  j["u_max"] = c.u_max;
  j["r_threshold"] = c.r_threshold;
  j["metrics"] = {{"steady_state_fraction", c.metrics.steady_state_fraction},
                  {"settle_band", c.metrics.settle_band}};
  Json channels = Json::array();
  for (const auto& ch : c.channels) {
    Json cj;
    cj["name"] = ch.name;
    cj["orbit"] = std::string(to_string(ch.orbit));
    cj["u_offset"] = ch.u_offset;
    cj["v_des"] = ramp_json(ch.v_des);
    cj["x0"] = vec_json(ch.x0.p, ch.x0.v);
    cj["plant"] = plant_json(ch.plant);
    channels.push_back(std::move(cj));
  }
  j["channels"] = std::move(channels);
  return j;
}

ScenarioConfig from_json(const Json& j) {
  ScenarioConfig c;
  Reader r(j, "");
  if (!r.has("schema_version")) throw ConfigError("schema_version", "missing");
  r.integer("schema_version", c.schema_version);
  if (c.schema_version != kSchemaVersion)
    throw ConfigError("schema_version",
                      "unsupported schema version " + std::to_string(c.schema_version));
  r.string("name", c.name);
  r.string("description", c.description);
  if (r.has("controller")) {
    std::string name;
    r.string("controller", name);
    c.controller = parse_controller(name);
  }
  r.integer("n_steps", c.n_steps);
  r.unsigned_integer("seed", c.seed);
  if (r.has("gait")) {
    Reader g = r.child("gait");
    g.number("z_com", c.gait.z_com);
    g.number("t_ssp", c.gait.t_ssp);
    g.number("t_dsp", c.gait.t_dsp);
    g.number("gravity", c.gait.gravity);
    g.finish();
  }
  if (r.has("estimator")) {
    Reader e = r.child("estimator");
    e.number("gamma", c.estimator.gamma);
    e.number("eps", c.estimator.eps);
    e.integer("window", c.estimator.window);
    e.boolean("freeze_on_reject", c.estimator.freeze_on_reject);
    e.finish();
  }
  if (r.has("gains")) {
    Reader g = r.child("gains");
    std::string method(gains::to_string(c.gains.method));
    g.string("method", method);
    if (method == "deadbeat") {
      c.gains.method = gains::GainMethod::Deadbeat;
    } else if (method == "lqr") {
      c.gains.method = gains::GainMethod::Lqr;
    } else {
      throw ConfigError("gains.method", "expected 'deadbeat' or 'lqr'");
    }
    g.matrix2("lqr_q", c.gains.lqr_q);
    g.number("lqr_r", c.gains.lqr_r);
    g.number("controllability_tol", c.gains.controllability_tol);
    g.number("riccati_tol", c.gains.riccati_tol);
    g.integer("riccati_max_iter", c.gains.riccati_max_iter);
    g.finish();
  }
  r.number("u_max", c.u_max);
  r.number("r_threshold", c.r_threshold);
  if (r.has("metrics")) {
    Reader m = r.child("metrics");
    m.number("steady_state_fraction", c.metrics.steady_state_fraction);
    m.number("settle_band", c.metrics.settle_band);
    m.finish();
  }
  if (r.has("channels")) {
    const auto& arr = r.at("channels");
    if (!arr.is_array()) throw ConfigError("channels", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Reader cr(arr[i], "channels." + std::to_string(i));
      ChannelConfig ch;
      cr.string("name", ch.name);
      std::string orbit(to_string(ch.orbit));
      cr.string("orbit", orbit);
      if (orbit == "P1") {
        ch.orbit = OrbitKind::P1;
      } else if (orbit == "P2") {
        ch.orbit = OrbitKind::P2;
      } else {
        throw ConfigError(cr.key("orbit"), "expected 'P1' or 'P2'");
      }
      cr.number("u_offset", ch.u_offset);
      if (cr.has("v_des")) read_ramp(cr.child("v_des"), ch.v_des);
      Vec2 x0 = ch.x0.vec();
      cr.vector2("x0", x0);
      ch.x0 = ComState::from(x0);
      ch.plant = plant::PlantConfig::hybrid(c.gait);
      if (cr.has("plant")) read_plant(cr.child("plant"), ch.plant, c.gait);
      ch.plant.gait = c.gait;
      cr.finish();
      c.channels.push_back(std::move(ch));
    }
  }
  r.finish();
  c.validate();
  return c;
}

std::string dump_config(const ScenarioConfig& config) { return to_json(config).dump(2) + "\n"; }

ScenarioConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return from_json(j);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void save_config(const ScenarioConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << dump_config(config);
}

ScenarioConfig with_parameter(const ScenarioConfig& config, const std::string& path,
                              double value) {
  Json j = to_json(config);
  Json* node = &j;
  std::stringstream ss(path);
  std::string segment;
  std::string walked;
  while (std::getline(ss, segment, '.')) {
    walked = join(walked, segment);
    if (node->is_object()) {
      if (!node->contains(segment)) throw ConfigError(walked, "no such parameter");
      node = &(*node)[segment];
    } else if (node->is_array()) {
      std::size_t idx = 0;
      const auto [ptr, ec] =
          std::from_chars(segment.data(), segment.data() + segment.size(), idx);
      if (ec == std::errc() && ptr == segment.data() + segment.size()) {
        if (idx >= node->size()) throw ConfigError(walked, "index out of range");
        node = &(*node)[idx];
      } else {
        // channels may be addressed by name
        Json* found = nullptr;
        for (auto& item : *node) {
          if (item.is_object() && item.contains("name") && item["name"] == segment) {
            found = &item;
            break;
          }
        }
        if (!found) throw ConfigError(walked, "no such parameter");
        node = found;
      }
    } else {
      throw ConfigError(walked, "no such parameter");
    }
  }
  if (path.empty() || !node->is_number()) throw ConfigError(path, "not a numeric parameter");
  if (node->is_number_integer()) {
    if (value != std::floor(value)) throw ConfigError(path, "expects an integer value");
    if (node->is_number_unsigned()) {
      if (value < 0) throw ConfigError(path, "expects a non-negative value");
      *node = static_cast<std::uint64_t>(value);
    } else {
      *node = static_cast<long long>(value);
    }
  } else {
    *node = value;
  }
  return from_json(j);
}

}  // namespace s2s::harness
