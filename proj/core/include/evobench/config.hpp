#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evobench/eval.hpp"
#include "evobench/taskgen.hpp"
#include "evobench/types.hpp"

namespace evobench {

/// Optional LLM plumbing. Endpoints left empty keep the pipeline on the
/// seeded proposer and the scripted oracle. The credential itself lives in
/// the environment variable named here, never in this file.
struct AdapterSettings {
  std::string proposer_endpoint;
  std::string agent_endpoint;
  std::string model = "default";
  std::string credential_env = "EVOBENCH_API_KEY";
};

/// Everything the pipeline commands need, loadable from one JSON file with
/// per-flag overrides on top.
struct PipelineConfig {
  std::uint64_t seed = 1;
  int episodes = 1;
  std::vector<Strategy> strategies{Strategy::Completion, Strategy::Saturation,
                                   Strategy::Deprecation};
  int tasks_per_version = 6;
  DifficultyMix mix;
  int memory_k = 5;
  int retry_budget = 2;
  int max_turns = 12;
  int reruns = 1;
  int jobs = 1;
  bool paper_scale = false;
  MemoryMode memory_mode = MemoryMode::Baseline;
  std::string out_dir = "out";
  AdapterSettings adapters;
};

Json config_to_json(const PipelineConfig& config);

/// Starts from defaults and overrides any key present. Unknown keys are
/// ConfigErrors so typos do not silently fall back to defaults.
PipelineConfig config_from_json(const Json& j);

PipelineConfig load_config(const std::string& path);

/// Throws ConfigError on: negative counts, empty strategy sequence,
/// non-positive mix ratios, jobs < 1, reruns < 1.
void validate_config(const PipelineConfig& config);

}  // namespace evobench
