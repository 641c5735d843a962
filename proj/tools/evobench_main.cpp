#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "evobench/config.hpp"
#include "evobench/errors.hpp"
#include "evobench/pipeline.hpp"

using namespace evobench;

namespace {

/// Flags land here as optionals so a flag only overrides the config file
/// when it was actually given.
struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::optional<std::vector<std::string>> strategies;
  std::optional<int> tasks_per_version;
  std::optional<int> memory_k;
  std::optional<int> retry_budget;
  std::optional<int> max_turns;
  std::optional<int> reruns;
  std::optional<int> jobs;
  std::optional<std::string> memory_mode;
  std::optional<std::string> out_dir;
  std::optional<std::string> proposer_endpoint;
  std::optional<std::string> agent_endpoint;
  std::optional<std::string> model;
  std::optional<std::string> credential_env;
  bool paper_scale = false;
};

PipelineConfig resolve(const Overrides& o) {
  PipelineConfig config;
  if (!o.config_path.empty()) config = load_config(o.config_path);
  if (o.seed) config.seed = *o.seed;
  if (o.episodes) config.episodes = *o.episodes;
  if (o.strategies) {
    config.strategies.clear();
    for (const auto& s : *o.strategies) config.strategies.push_back(parse_strategy(s));
  }
  if (o.tasks_per_version) config.tasks_per_version = *o.tasks_per_version;
  if (o.memory_k) config.memory_k = *o.memory_k;
  if (o.retry_budget) config.retry_budget = *o.retry_budget;
  if (o.max_turns) config.max_turns = *o.max_turns;
  if (o.reruns) config.reruns = *o.reruns;
  if (o.jobs) config.jobs = *o.jobs;
  if (o.memory_mode) config.memory_mode = parse_memory_mode(*o.memory_mode);
  if (o.out_dir) config.out_dir = *o.out_dir;
  if (o.proposer_endpoint) config.adapters.proposer_endpoint = *o.proposer_endpoint;
  if (o.agent_endpoint) config.adapters.agent_endpoint = *o.agent_endpoint;
  if (o.model) config.adapters.model = *o.model;
  if (o.credential_env) config.adapters.credential_env = *o.credential_env;
  if (o.paper_scale) config.paper_scale = true;
  validate_config(config);
  return config;
}

void add_common_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file; flags override it");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--episodes", o.episodes, "number of evolution episodes");
  cmd->add_option("--strategies", o.strategies,
                  "evolution strategy sequence (completion|saturation|deprecation)");
  cmd->add_option("--tasks-per-version", o.tasks_per_version, "tasks generated per version");
  cmd->add_option("--memory-k", o.memory_k, "memory capacity k");
  cmd->add_option("--retry-budget", o.retry_budget, "clarification retries per turn");
  cmd->add_option("--max-turns", o.max_turns, "reference trajectory turn cap");
  cmd->add_option("--reruns", o.reruns, "evaluation reruns per task");
  cmd->add_option("--jobs", o.jobs, "episode-level parallelism");
  cmd->add_option("--memory-mode", o.memory_mode, "baseline|history|reflection");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--proposer-endpoint", o.proposer_endpoint,
                  "chat endpoint for the LLM proposer (empty: seeded templates)");
  cmd->add_option("--agent-endpoint", o.agent_endpoint,
                  "chat endpoint for the LLM agent (empty: scripted oracle)");
  cmd->add_option("--model", o.model, "model name passed to adapters");
  cmd->add_option("--credential-env", o.credential_env,
                  "environment variable holding the adapter credential");
  cmd->add_flag("--paper-scale", o.paper_scale, "full-size seed fixtures");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evolving-environment benchmark pipeline"};
  app.require_subcommand(1);

  Overrides o;
  int (*selected)(const PipelineConfig&, std::ostream&) = nullptr;

  struct CommandRow {
    const char* name;
    const char* help;
    int (*fn)(const PipelineConfig&, std::ostream&);
  };
  const CommandRow rows[] = {
      {"seed", "emit the seed environment", &cmd_seed},
      {"evolve", "run evolution episodes", &cmd_evolve},
      {"taskgen", "generate tasks for every version", &cmd_taskgen},
      {"eval", "evaluate a policy over the episodes", &cmd_eval},
      {"validate", "audit emitted artifacts", &cmd_validate},
      {"report", "merge per-episode reports", &cmd_report},
      {"run", "full pipeline: seed, evolve, taskgen, eval, report", &run_pipeline},
  };
  for (const CommandRow& row : rows) {
    CLI::App* cmd = app.add_subcommand(row.name, row.help);
    add_common_flags(cmd, o);
    cmd->callback([&selected, fn = row.fn]() { selected = fn; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    PipelineConfig config = resolve(o);
    return selected(config, std::cout);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
