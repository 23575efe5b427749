#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "s2s/harness.hpp"

namespace s2s::harness {

// Scenario files are JSON objects. Every key is optional except
// `schema_version`; missing keys take the defaults of ScenarioConfig and
// unknown keys are rejected. See README for the schema.

nlohmann::ordered_json to_json(const ScenarioConfig& config);

/// Throws ConfigError naming the offending key (dotted path).
ScenarioConfig from_json(const nlohmann::ordered_json& j);

ScenarioConfig load_config(const std::filesystem::path& path);
void save_config(const ScenarioConfig& config, const std::filesystem::path& path);

std::string dump_config(const ScenarioConfig& config);
ScenarioConfig parse_config(const std::string& text);

/// Returns a copy of `config` with the numeric entry at a dotted path set.
/// Throws ConfigError if the path does not name an existing numeric entry.
ScenarioConfig with_parameter(const ScenarioConfig& config, const std::string& path,
                              double value);

}  // namespace s2s::harness
