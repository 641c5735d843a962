#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "evobench/config.hpp"

namespace evobench {

/// "episode_000", "episode_001", ... Also used as the episode id, so the
/// directory name and the manifest agree.
std::string episode_label(int index);

std::filesystem::path episode_dir(const PipelineConfig& config, int index);

/// Pipeline commands. Each returns a process exit status: 0 on success,
/// nonzero when anything failed validation, with one diagnostic line per
/// problem written to `log` naming the episode, version, and task concerned.
/// All of them are deterministic given (config, seed): identical inputs
/// produce byte-identical output trees.
int cmd_seed(const PipelineConfig& config, std::ostream& log);
int cmd_evolve(const PipelineConfig& config, std::ostream& log);
int cmd_taskgen(const PipelineConfig& config, std::ostream& log);
int cmd_eval(const PipelineConfig& config, std::ostream& log);
int cmd_validate(const PipelineConfig& config, std::ostream& log);
int cmd_report(const PipelineConfig& config, std::ostream& log);

/// seed -> evolve -> taskgen -> eval -> report, stopping at the first
/// nonzero status.
int run_pipeline(const PipelineConfig& config, std::ostream& log);

}  // namespace evobench
