#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "chainbk/calibration.hpp"
#include "chainbk/game.hpp"
#include "chainbk/netgen.hpp"

namespace chainbk::cli {

using Json = nlohmann::ordered_json;

/// Everything a CLI run depends on. Loaded from --config, overridden by
/// flags, and echoed into every output.
struct ScenarioConfig {
  std::string panel;
  std::string edges;
  std::string gdp;
  std::string params;
  std::string fit;
  std::string out_dir = ".";
  std::uint64_t seed = 1;

  GeneratorConfig generator;
  FitOptions calibration;
  GameConfig game;

  std::vector<std::string> triggers;
  std::string policy = "zero-revenue";
  std::optional<std::size_t> max_generations;
  std::vector<std::string> formats{"json", "dot", "graphml"};
  std::string orientation = "money-flow";

  std::size_t simulate_periods = 11;
  bool simulate_noise = false;
};

Json to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const Json& j);
ScenarioConfig load_scenario(const std::string& path);

EdgeModel parse_edge_model(const std::string& s);
std::string edge_model_name(EdgeModel m);
BankruptRatioPolicy parse_policy(const std::string& s);

}  // namespace chainbk::cli
