// Command line front end for the scenario harness.
//
//   s2s_sim list-scenarios
//   s2s_sim run <scenario|config.json> [--controller X] [--out dir] [--seed N]
//   s2s_sim compare <scenario|config.json> --controllers a,b,c [--out dir]
//   s2s_sim sweep <scenario|config.json> --param path --values v1,v2,... [--jobs N]
//   s2s_sim dump-config <scenario> [--controller X]
//
// Exit codes: 0 success, 1 fall or divergence, 2 configuration error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "s2s/config.hpp"
#include "s2s/csv.hpp"
#include "s2s/errors.hpp"
#include "s2s/harness.hpp"

namespace fs = std::filesystem;
using namespace s2s;
using namespace s2s::harness;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFall = 1;
constexpr int kExitConfig = 2;

/// A built-in scenario name or a path to a JSON config file.
ScenarioConfig resolve(const std::string& target, const std::optional<std::string>& controller) {
  ScenarioConfig cfg;
  const auto names = builtin_scenario_names();
  if (std::find(names.begin(), names.end(), target) != names.end()) {
    cfg = builtin_scenario(target);
  } else if (fs::exists(target)) {
    cfg = load_config(target);
  } else {
    throw ConfigError("scenario", "'" + target + "' is neither a built-in scenario nor a file");
  }
  if (controller) cfg.controller = parse_controller(*controller);
  return cfg;
}

void write_outputs(const std::vector<EpisodeResult>& results,
                   const std::vector<std::string>& labels, const std::optional<std::string>& out) {
  std::ostringstream metrics;
  write_metrics_header(metrics);
  for (std::size_t i = 0; i < results.size(); ++i) write_metrics_rows(metrics, results[i], labels[i]);
  std::cout << metrics.str();
  if (!out) return;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const fs::path dir = labels[i].empty() ? fs::path(*out) : fs::path(*out) / labels[i];
    write_episode_csv(results[i], dir);
  }
  fs::create_directories(*out);
  std::ofstream summary(fs::path(*out) / "metrics.csv");
  summary << metrics.str();
}

int status_of(const std::vector<EpisodeResult>& results) {
  for (const auto& r : results) {
    if (r.fell()) return kExitFall;
  }
  return kExitOk;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("values", "'" + item + "' is not a number");
    }
  }
  return values;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive step-to-step walking simulator"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list-scenarios", "List the built-in scenarios");

  std::string target;
  std::optional<std::string> controller;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  int jobs = 1;

  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("scenario", target, "Built-in scenario name or JSON config file")->required();
  run->add_option("--controller", controller, "baseline_hlip | adaptive_state | adaptive_output");
  run->add_option("--out", out, "Directory for per-channel CSV logs and metrics.csv");
  run->add_option("--seed", seed, "Override the scenario seed");

  std::string controllers = "baseline_hlip,adaptive_state,adaptive_output";
  auto* cmp = app.add_subcommand("compare", "Run a scenario under several controllers");
  cmp->add_option("scenario", target, "Built-in scenario name or JSON config file")->required();
  cmp->add_option("--controllers", controllers, "Comma separated controller list")
      ->capture_default_str();
  cmp->add_option("--out", out, "Output directory");
  cmp->add_option("--seed", seed, "Override the scenario seed");
  cmp->add_option("--jobs", jobs, "Concurrent episodes")->check(CLI::PositiveNumber);

  std::string param;
  std::string values;
  auto* swp = app.add_subcommand("sweep", "Evaluate a scenario over values of one parameter");
  swp->add_option("scenario", target, "Built-in scenario name or JSON config file")->required();
  swp->add_option("--param", param, "Dotted config path, e.g. estimator.gamma")->required();
  swp->add_option("--values", values, "Comma separated values")->required();
  swp->add_option("--controller", controller, "Controller override");
  swp->add_option("--out", out, "Output directory");
  swp->add_option("--seed", seed, "Override the base seed");
  swp->add_option("--jobs", jobs, "Concurrent episodes")->check(CLI::PositiveNumber);

  auto* dump = app.add_subcommand("dump-config", "Print a scenario as a JSON config file");
  dump->add_option("scenario", target, "Built-in scenario name or JSON config file")->required();
  dump->add_option("--controller", controller, "Controller override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*list) {
      for (const auto& name : builtin_scenario_names()) {
        std::cout << name << '\t' << builtin_scenario(name).description << '\n';
      }
      return kExitOk;
    }
    if (*dump) {
      std::cout << dump_config(resolve(target, controller));
      return kExitOk;
    }
    if (*run) {
      auto cfg = resolve(target, controller);
      if (seed) cfg.seed = *seed;
      std::vector<EpisodeResult> results{run_episode(cfg)};
      write_outputs(results, {""}, out);
      return status_of(results);
    }
    if (*cmp) {
      const auto base = resolve(target, std::nullopt);
      std::vector<ScenarioConfig> configs;
      std::vector<std::string> labels;
      for (const auto& name : split(controllers)) {
        auto cfg = base;
        cfg.controller = parse_controller(name);
        if (seed) cfg.seed = *seed;
        configs.push_back(std::move(cfg));
        labels.push_back(name);
      }
      if (configs.empty()) throw ConfigError("controllers", "empty controller list");
      const auto results = compare(configs, jobs);
      write_outputs(results, labels, out);
      return status_of(results);
    }
    if (*swp) {
      auto base = resolve(target, controller);
      if (seed) base.seed = *seed;
      const auto vals = parse_values(values);
      if (vals.empty()) throw ConfigError("values", "empty value list");
      const auto cells = sweep(base, param, vals, jobs);
      std::vector<EpisodeResult> results;
      std::vector<std::string> labels;
      for (const auto& cell : cells) {
        std::ostringstream label;
        label << param << '=' << cell.value;
        results.push_back(cell.result);
        labels.push_back(label.str());
      }
      write_outputs(results, labels, out);
      return status_of(results);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFall;
  }
  return kExitOk;
}
