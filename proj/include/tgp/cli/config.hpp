#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "tgp/datasets/qa_item.hpp"
#include "tgp/datasets/splits.hpp"
#include "tgp/gateway/backend.hpp"
#include "tgp/gateway/gateway.hpp"
#include "tgp/optimizer/optimizer.hpp"
#include "tgp/strategies/strategies.hpp"

namespace tgp::cli {

struct EngineSettings {
  gateway::BackendConfig backend;
  gateway::EndpointConfig endpoint;
  bool cache = true;
};

/// Everything a command needs besides dataset paths and the output dir.
struct RunConfig {
  EngineSettings task;
  EngineSettings backward;
  optimizer::OptimizerConfig optimizer;
  datasets::SplitSpec split;
  datasets::TaskFormat format = datasets::TaskFormat::multiple_choice();
  strategies::PromptStrategy strategy;
  std::optional<std::filesystem::path> mock_script;
};

RunConfig default_config();

/// Overlays the keys present in `j` onto `config`. Unknown keys are a
/// ConfigError so typos do not silently fall back to defaults.
void merge(RunConfig& config, const nlohmann::json& j);

/// Reads a JSON config file and merges it over the defaults.
RunConfig load_config(const std::filesystem::path& path);

/// Full snapshot; merge(default_config(), to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig& config);

}  // namespace tgp::cli
