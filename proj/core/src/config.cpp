#include "evobench/config.hpp"

#include <set>

#include "evobench/errors.hpp"
#include "evobench/graph_io.hpp"

namespace evobench {

Json config_to_json(const PipelineConfig& config) {
  Json strategies = Json::array();
  for (Strategy s : config.strategies) strategies.push_back(to_string(s));
  return Json{
      {"seed", config.seed},
      {"episodes", config.episodes},
      {"strategies", std::move(strategies)},
      {"tasks_per_version", config.tasks_per_version},
      {"difficulty_mix", Json{{"easy", config.mix.easy},
                              {"medium", config.mix.medium},
                              {"hard", config.mix.hard}}},
      {"memory_k", config.memory_k},
      {"retry_budget", config.retry_budget},
      {"max_turns", config.max_turns},
      {"reruns", config.reruns},
      {"jobs", config.jobs},
      {"paper_scale", config.paper_scale},
      {"memory_mode", to_string(config.memory_mode)},
      {"out_dir", config.out_dir},
      {"adapters", Json{{"proposer_endpoint", config.adapters.proposer_endpoint},
                        {"agent_endpoint", config.adapters.agent_endpoint},
                        {"model", config.adapters.model},
                        {"credential_env", config.adapters.credential_env}}}};
}

PipelineConfig config_from_json(const Json& j) {
  static const std::set<std::string> known{
      "seed",       "episodes",  "strategies", "tasks_per_version",
      "difficulty_mix", "memory_k", "retry_budget", "max_turns",
      "reruns",     "jobs",      "paper_scale", "memory_mode",
      "out_dir",    "adapters"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key: " + key);
  }
  PipelineConfig config;
  config.seed = j.value("seed", config.seed);
  config.episodes = j.value("episodes", config.episodes);
  if (j.contains("strategies")) {
    config.strategies.clear();
    for (const auto& s : j.at("strategies")) {
      config.strategies.push_back(parse_strategy(s.get<std::string>()));
    }
  }
  config.tasks_per_version = j.value("tasks_per_version", config.tasks_per_version);
  if (j.contains("difficulty_mix")) {
    const Json& mix = j.at("difficulty_mix");
    for (const auto& [key, value] : mix.items()) {
      if (key != "easy" && key != "medium" && key != "hard") {
        throw ConfigError("unknown difficulty_mix key: " + key);
      }
    }
    config.mix.easy = mix.value("easy", config.mix.easy);
    config.mix.medium = mix.value("medium", config.mix.medium);
    config.mix.hard = mix.value("hard", config.mix.hard);
  }
  config.memory_k = j.value("memory_k", config.memory_k);
  config.retry_budget = j.value("retry_budget", config.retry_budget);
  config.max_turns = j.value("max_turns", config.max_turns);
  config.reruns = j.value("reruns", config.reruns);
  config.jobs = j.value("jobs", config.jobs);
  config.paper_scale = j.value("paper_scale", config.paper_scale);
  if (j.contains("memory_mode")) {
    config.memory_mode = parse_memory_mode(j.at("memory_mode").get<std::string>());
  }
  config.out_dir = j.value("out_dir", config.out_dir);
  if (j.contains("adapters")) {
    const Json& a = j.at("adapters");
    for (const auto& [key, value] : a.items()) {
      if (key != "proposer_endpoint" && key != "agent_endpoint" &&
          key != "model" && key != "credential_env") {
        throw ConfigError("unknown adapters key: " + key);
      }
    }
    config.adapters.proposer_endpoint =
        a.value("proposer_endpoint", config.adapters.proposer_endpoint);
    config.adapters.agent_endpoint =
        a.value("agent_endpoint", config.adapters.agent_endpoint);
    config.adapters.model = a.value("model", config.adapters.model);
    config.adapters.credential_env =
        a.value("credential_env", config.adapters.credential_env);
  }
  return config;
}

PipelineConfig load_config(const std::string& path) {
  return config_from_json(read_json_file(path));
}

void validate_config(const PipelineConfig& config) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(config.episodes >= 0, "episodes must be >= 0");
  require(config.tasks_per_version >= 0, "tasks_per_version must be >= 0");
  require(!config.strategies.empty(), "strategy sequence must be non-empty");
  require(config.mix.easy > 0 && config.mix.medium > 0 && config.mix.hard > 0,
          "difficulty mix ratios must be positive");
  require(config.memory_k >= 0, "memory_k must be >= 0");
  require(config.retry_budget >= 0, "retry_budget must be >= 0");
  require(config.max_turns >= 0, "max_turns must be >= 0");
  require(config.reruns >= 1, "reruns must be >= 1");
  require(config.jobs >= 1, "jobs must be >= 1");
  require(!config.out_dir.empty(), "out_dir must be set");
}

}  // namespace evobench
