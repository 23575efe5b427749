#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "s2s/harness.hpp"

namespace s2s::harness {

/// Column names of the per-step CSV, in file order.
const std::vector<std::string>& step_csv_columns();

/// Column names of the metrics summary CSV, in file order.
const std::vector<std::string>& metrics_csv_columns();

void write_step_csv(std::ostream& out, const std::string& scenario, ControllerKind controller,
                    const ChannelResult& channel);

void write_metrics_header(std::ostream& out);
void write_metrics_rows(std::ostream& out, const EpisodeResult& result,
                        const std::string& label = {});

/// Writes <dir>/<scenario>__<controller>__<channel>.csv for every channel and
/// returns the paths written.
std::vector<std::filesystem::path> write_episode_csv(const EpisodeResult& result,
                                                     const std::filesystem::path& dir);

}  // namespace s2s::harness
