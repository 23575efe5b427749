#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "s2s/config.hpp"
#include "s2s/csv.hpp"
#include "s2s/errors.hpp"
#include "s2s/gains.hpp"
#include "s2s/harness.hpp"
#include "s2s/hlip.hpp"
#include "s2s/s2s_id.hpp"
#include "s2s/stepping.hpp"

namespace py = pybind11;
using namespace s2s;

namespace {

GaitParams make_gait(double z_com, double t_ssp, double t_dsp, double gravity) {
  GaitParams g{z_com, t_ssp, t_dsp, gravity};
  g.validate();
  return g;
}

OrbitKind parse_orbit(const std::string& name) {
  if (name == "P1") return OrbitKind::P1;
  if (name == "P2") return OrbitKind::P2;
  throw std::invalid_argument("orbit must be 'P1' or 'P2'");
}

py::dict metrics_dict(const harness::Metrics& m) {
  py::dict d;
  d["steps"] = m.steps;
  d["fell"] = m.fell;
  d["ss_velocity_error"] = m.ss_velocity_error;
  d["settling_step"] = m.settling_step;
  d["max_velocity_error"] = m.max_velocity_error;
  d["ss_step_error"] = m.ss_step_error;
  d["ss_command_error"] = m.ss_command_error;
  d["prediction_rms"] = m.prediction_rms;
  d["saturated_steps"] = m.saturated_steps;
  return d;
}

py::list run_config(const harness::ScenarioConfig& cfg) {
  harness::EpisodeResult res;
  {
    py::gil_scoped_release release;
    res = harness::run_episode(cfg);
  }
  py::list out;
  for (const auto& ch : res.channels) {
    std::ostringstream csv;
    harness::write_step_csv(csv, res.scenario, res.controller, ch);
    py::dict d;
    d["scenario"] = res.scenario;
    d["controller"] = std::string(harness::to_string(res.controller));
    d["channel"] = ch.channel;
    d["orbit"] = std::string(to_string(ch.orbit));
    d["metrics"] = metrics_dict(ch.metrics);
    d["csv"] = csv.str();
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adaptive step-to-step walking controller: H-LIP, online identification, gains "
            "and the scenario harness.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SingularModelError>(m, "SingularModelError", PyExc_ArithmeticError);
  py::register_exception<UncontrollableModelError>(m, "UncontrollableModelError",
                                                   PyExc_ArithmeticError);
  py::register_exception<RiccatiDivergenceError>(m, "RiccatiDivergenceError",
                                                 PyExc_ArithmeticError);
  py::register_exception<DegenerateFeedforwardError>(m, "DegenerateFeedforwardError",
                                                     PyExc_ArithmeticError);

  m.def(
      "s2s_matrices",
      [](double z_com, double t_ssp, double t_dsp, double gravity) {
        const auto h = hlip::s2s_matrices(make_gait(z_com, t_ssp, t_dsp, gravity));
        return py::make_tuple(Mat2(h.a), Vec2(h.b));
      },
      py::arg("z_com"), py::arg("t_ssp"), py::arg("t_dsp") = 0.0, py::arg("gravity") = 9.81,
      "Closed-form H-LIP step-to-step matrices (A, B).");

  m.def(
      "integrate_step",
      [](const Vec2& x, double u, double z_com, double t_ssp, double t_dsp, double gravity,
         double dt) {
        return hlip::integrate_step(ComState::from(x), u, make_gait(z_com, t_ssp, t_dsp, gravity),
                                    dt)
            .vec();
      },
      py::arg("x"), py::arg("u"), py::arg("z_com"), py::arg("t_ssp"), py::arg("t_dsp") = 0.0,
      py::arg("gravity") = 9.81, py::arg("dt") = hlip::kDefaultDt,
      "One step of the H-LIP by numerical integration.");

  m.def(
      "nominal_orbit",
      [](double v_des, const std::string& orbit, double u_offset, double z_com, double t_ssp,
         double t_dsp, double gravity) {
        const auto t = hlip::nominal_orbit(make_gait(z_com, t_ssp, t_dsp, gravity), v_des,
                                           parse_orbit(orbit), u_offset);
        py::dict d;
        d["u_star"] = py::make_tuple(t.u_star.left, t.u_star.right);
        d["x_star"] = py::make_tuple(t.x_star.left.vec(), t.x_star.right.vec());
        d["period"] = t.period;
        return d;
      },
      py::arg("v_des"), py::arg("orbit") = "P1", py::arg("u_offset") = hlip::kDefaultP2Offset,
      py::arg("z_com") = 0.75, py::arg("t_ssp") = 0.3, py::arg("t_dsp") = 0.0,
      py::arg("gravity") = 9.81,
      "Nominal P1/P2 orbit: step sizes and pre-impact states for (left, right).");

  m.def(
      "projection_update",
      [](const Eigen::MatrixXd& theta, const Eigen::VectorXd& phi, const Eigen::VectorXd& z,
         const Eigen::MatrixXd& gamma, double eps) {
        const auto r = ident::projection_update(theta, phi, z, gamma, eps);
        return py::make_tuple(r.theta, r.skipped);
      },
      py::arg("theta"), py::arg("phi"), py::arg("z"), py::arg("gamma"),
      py::arg("eps") = ident::kDefaultEps,
      "Projection-algorithm update; returns (theta_new, skipped).");

  m.def(
      "horizon_update",
      [](const Eigen::MatrixXd& theta, const Eigen::MatrixXd& window, const Eigen::MatrixXd& z,
         const Eigen::MatrixXd& gamma, double eps) {
        const auto r = ident::horizon_update(theta, window, z, gamma, eps);
        return py::make_tuple(r.theta, r.skipped);
      },
      py::arg("theta"), py::arg("window"), py::arg("z"), py::arg("gamma"),
      py::arg("eps") = ident::kDefaultEps,
      "Horizon variant over a window of q regressors; returns (theta_new, skipped).");

  m.def(
      "deadbeat_gain", [](const Mat2& a, const Vec2& b) { return RowVec2(gains::deadbeat_gain(a, b).k); },
      py::arg("a"), py::arg("b"), "Deadbeat state feedback k with (a + b k)^2 = 0.");

  m.def(
      "dlqr",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& q,
         const Eigen::MatrixXd& r, double tol, int max_iter) {
        const auto s = gains::dlqr(a, b, q, r, tol, max_iter);
        return py::make_tuple(s.k, s.p);
      },
      py::arg("a"), py::arg("b"), py::arg("q"), py::arg("r"), py::arg("tol") = 1e-12,
      py::arg("max_iter") = 100000, "Discrete LQR; returns (k, p) with u = k x.");

  m.def(
      "p1_fixed_point",
      [](const Mat2& a, const Vec2& b, const Vec2& c, double u_star) {
        return stepping::p1_fixed_point(a, b, c, u_star).vec();
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("u_star"),
      "Fixed point of x+ = a x + b u* + c.");

  m.def(
      "bias_equilibrium",
      [](const Mat2& a, const Vec2& b, const Vec2& c, const RowVec2& k, const Vec2& bias,
         const Vec2& x_ref, double u_ref) {
        return stepping::bias_equilibrium(a, b, c, k, bias, ComState::from(x_ref), u_ref).vec();
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("k"), py::arg("bias"), py::arg("x_ref"),
      py::arg("u_ref"), "Closed-loop equilibrium under a constant measurement bias.");

  m.def("builtin_scenario_names", &harness::builtin_scenario_names);

  m.def(
      "builtin_config",
      [](const std::string& name, const std::string& controller) {
        return harness::dump_config(harness::builtin_scenario(name, harness::parse_controller(controller)));
      },
      py::arg("name"), py::arg("controller") = "adaptive_state",
      "JSON configuration of a built-in scenario.");

  m.def(
      "run_config", [](const std::string& json) { return run_config(harness::parse_config(json)); },
      py::arg("config_json"),
      "Runs a scenario given as JSON. Returns one dict per channel with the metrics and the "
      "per-step CSV text.");

  m.def(
      "run_scenario",
      [](const std::string& name, const std::string& controller) {
        return run_config(harness::builtin_scenario(name, harness::parse_controller(controller)));
      },
      py::arg("name"), py::arg("controller") = "adaptive_state", "Runs a built-in scenario.");

  m.def("step_csv_columns", &harness::step_csv_columns);
  m.def("metrics_csv_columns", &harness::metrics_csv_columns);
}
