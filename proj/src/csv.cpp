#include "s2s/csv.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace s2s::harness {

namespace {

const char* const kThetaNames[12] = {"theta_a11", "theta_a12", "theta_a21", "theta_a22",
                                     "theta_b1",  "theta_b2",  "theta_c1",  "theta_c2",
                                     "theta_d1",  "theta_d2",  "theta_e",   "theta_f"};

/// Formats numbers with round-trip precision; NaN is written as "nan".
class Row {
 public:
  explicit Row(std::ostream& out) : out_(out) {}

  Row& operator<<(double v) {
    sep();
    if (std::isnan(v)) {
      out_ << "nan";
    } else {
      std::ostringstream s;
      s << std::setprecision(17) << v;
      out_ << s.str();
    }
    return *this;
  }
  Row& operator<<(int v) { return raw(std::to_string(v)); }
  Row& operator<<(long v) { return raw(std::to_string(v)); }
  Row& operator<<(bool v) { return raw(v ? "1" : "0"); }
  Row& operator<<(std::string_view v) { return raw(std::string(v)); }
  Row& operator<<(const char* v) { return raw(v); }
  Row& operator<<(const std::string& v) { return raw(v); }

  void end() { out_ << '\n'; }

 private:
  Row& raw(const std::string& v) {
    sep();
    out_ << v;
    return *this;
  }
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }
  std::ostream& out_;
  bool first_ = true;
};

void write_header(std::ostream& out, const std::vector<std::string>& columns) {
  Row r(out);
  for (const auto& c : columns) r << c;
  r.end();
}

}  // namespace

const std::vector<std::string>& step_csv_columns() {
  static const std::vector<std::string> columns = [] {
    std::vector<std::string> c = {"scenario",   "controller", "channel",  "orbit",
                                  "step",       "stance",     "p_meas",   "v_meas",
                                  "p_true",     "v_true",     "v_des",    "v_step",
                                  "v_walk",     "u_star",     "p_star",   "v_star",
                                  "u_ctrl",     "u_cmd",      "saturated", "y_actual",
                                  "duration",   "k_p",        "k_v",      "k_f",
                                  "b_f"};
    for (const char* t : kThetaNames) c.emplace_back(t);
    for (const char* t : {"residual", "update_skipped", "model_rejected", "gain_fallback",
                          "target_fallback", "feedforward_fallback", "status"})
      c.emplace_back(t);
    return c;
  }();
  return columns;
}

const std::vector<std::string>& metrics_csv_columns() {
  static const std::vector<std::string> columns = {
      "label",          "scenario",          "controller",       "channel",
      "orbit",          "steps",             "fell",             "ss_velocity_error",
      "settling_step",  "max_velocity_error", "ss_step_error",   "ss_command_error",
      "prediction_rms", "saturated_steps"};
  return columns;
}

void write_step_csv(std::ostream& out, const std::string& scenario, ControllerKind controller,
                    const ChannelResult& channel) {
  write_header(out, step_csv_columns());
  for (const auto& s : channel.records) {
    Row r(out);
    r << scenario << to_string(controller) << channel.channel << to_string(channel.orbit)
      << s.step << to_string(s.stance) << s.x_meas.p << s.x_meas.v << s.x_true.p << s.x_true.v
      << s.v_des << s.v_step << s.v_walk << s.u_star << s.x_star.p << s.x_star.v << s.u_ctrl
      << s.u_cmd << s.saturated << s.y_actual << s.duration << s.k(0) << s.k(1) << s.k_f
      << s.b_f;
    for (double t : s.theta) r << t;
    r << s.residual << s.update_skipped << s.model_rejected << s.gain_fallback
      << s.target_fallback << s.feedforward_fallback
      << (s.status == StepStatus::Ok ? "ok" : "fall");
    r.end();
  }
}

void write_metrics_header(std::ostream& out) { write_header(out, metrics_csv_columns()); }

void write_metrics_rows(std::ostream& out, const EpisodeResult& result,
                        const std::string& label) {
  for (const auto& ch : result.channels) {
    const auto& m = ch.metrics;
    Row r(out);
    r << label << result.scenario << to_string(result.controller) << ch.channel
      << to_string(ch.orbit) << m.steps << m.fell << m.ss_velocity_error << m.settling_step
      << m.max_velocity_error << m.ss_step_error << m.ss_command_error << m.prediction_rms
      << m.saturated_steps;
    r.end();
  }
}

std::vector<std::filesystem::path> write_episode_csv(const EpisodeResult& result,
                                                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  for (const auto& ch : result.channels) {
    const auto path = dir / (result.scenario + "__" + std::string(to_string(result.controller)) +
                             "__" + ch.channel + ".csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_step_csv(out, result.scenario, result.controller, ch);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace s2s::harness
