#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "collapse/simulation.hpp"
#include "collapse/sweep.hpp"

namespace collapse {

// Strict parsers: unknown keys and out-of-range values raise ConfigError
// naming the offending field; JSON syntax errors carry a line reference.
nlohmann::json parse_json_file(const std::string& path);

SimConfig sim_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimConfig& config);

SweepGrid sweep_grid_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SweepGrid& grid);

void write_text_file(const std::string& path, const std::string& content);

std::string rounds_csv(const SimResult& result);
std::string pdf_csv(const GriddedPdf& pdf);
std::string sweep_runs_csv(const SweepResult& result);
std::string aggregate_csv(const std::vector<AggregateRow>& rows,
                          const std::vector<std::string>& group_by);

}  // namespace collapse
