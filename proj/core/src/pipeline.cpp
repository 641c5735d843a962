#include "evobench/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include "evobench/adapters.hpp"
#include "evobench/errors.hpp"
#include "evobench/evolve.hpp"
#include "evobench/graph_io.hpp"
#include "evobench/seed_env.hpp"

namespace evobench {

namespace fs = std::filesystem;

std::string episode_label(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "episode_%03d", index);
  return buf;
}

fs::path episode_dir(const PipelineConfig& config, int index) {
  return fs::path(config.out_dir) / episode_label(index);
}

namespace {

SeedScale scale_of(const PipelineConfig& config) {
  return config.paper_scale ? SeedScale::Paper : SeedScale::Desk;
}

std::uint64_t episode_seed(const PipelineConfig& config, int index) {
  return Rng(config.seed).fork("episode", static_cast<std::uint64_t>(index)).seed();
}

/// Runs `work(index)` for every episode, `jobs` at a time. Per-episode log
/// text is buffered and emitted in index order so parallel runs stay
/// readable and diffable. Returns the worst status.
int for_each_episode(const PipelineConfig& config, std::ostream& log,
                     const std::function<int(int, std::ostream&)>& work) {
  const int n = config.episodes;
  std::vector<std::string> buffers(n);
  std::vector<int> statuses(n, 0);
  std::atomic<int> cursor{0};
  auto runner = [&]() {
    for (int e = cursor.fetch_add(1); e < n; e = cursor.fetch_add(1)) {
      std::ostringstream out;
      try {
        statuses[e] = work(e, out);
      } catch (const std::exception& ex) {
        out << episode_label(e) << ": error: " << ex.what() << "\n";
        statuses[e] = 1;
      }
      buffers[e] = out.str();
    }
  };
  int jobs = std::min(config.jobs, std::max(1, n));
  if (jobs <= 1) {
    runner();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(runner);
    for (auto& th : pool) th.join();
  }
  int status = 0;
  for (int e = 0; e < n; ++e) {
    log << buffers[e];
    status = std::max(status, statuses[e]);
  }
  return status;
}

std::unique_ptr<Proposer> make_proposer(const PipelineConfig& config,
                                        SeededProposer& fallback) {
  if (config.adapters.proposer_endpoint.empty()) return nullptr;
  ChatEndpoint ep = parse_endpoint(config.adapters.proposer_endpoint);
  ep.model = config.adapters.model;
  ep.credential_env = config.adapters.credential_env;
  return std::make_unique<HttpProposer>(ep, &fallback);
}

PolicyFactory make_policy_factory(const PipelineConfig& config) {
  if (config.adapters.agent_endpoint.empty()) {
    return [](const TaskInstance& task) {
      return std::unique_ptr<AgentPolicy>(new ScriptedOraclePolicy(task));
    };
  }
  ChatEndpoint ep = parse_endpoint(config.adapters.agent_endpoint);
  ep.model = config.adapters.model;
  ep.credential_env = config.adapters.credential_env;
  return [ep](const TaskInstance&) {
    return std::unique_ptr<AgentPolicy>(new HttpAgentPolicy(ep));
  };
}

}  // namespace

int cmd_seed(const PipelineConfig& config, std::ostream& log) {
  EnvGraph graph = build_seed_graph(scale_of(config));
  ValidationReport report = validate(graph);
  if (!report.ok()) {
    log << "seed: " << report.summary() << "\n";
    return 1;
  }
  fs::path dir = fs::path(config.out_dir) / "seed";
  fs::create_directories(dir);
  write_graph_file(dir / (graph.version_id() + ".json"), graph);
  Json store = build_seed_store(scale_of(config), config.seed);
  write_text_file(dir / "store.json", canonical_text(store));
  log << "seed: " << graph.version_id() << " with " << graph.node_count()
      << " nodes, " << graph.tool_count() << " tools\n";
  return 0;
}

int cmd_evolve(const PipelineConfig& config, std::ostream& log) {
  EnvGraph seed_graph = build_seed_graph(scale_of(config));
  return for_each_episode(config, log, [&](int e, std::ostream& out) {
    SeededProposer seeded;
    std::unique_ptr<Proposer> http = make_proposer(config, seeded);
    Proposer& proposer = http ? *http : static_cast<Proposer&>(seeded);
    Episode episode = run_episode(seed_graph, config.strategies, proposer,
                                  episode_seed(config, e), episode_label(e));
    ValidationReport report = validate_evolution(episode);
    if (!report.ok()) {
      out << episode_label(e) << ": " << report.summary() << "\n";
      return 1;
    }
    write_episode(episode, episode_dir(config, e));
    out << episode_label(e) << ": " << episode.version_count() << " versions, "
        << episode.version(episode.version_count() - 1).tool_count()
        << " tools in the last\n";
    return 0;
  });
}

int cmd_taskgen(const PipelineConfig& config, std::ostream& log) {
  return for_each_episode(config, log, [&](int e, std::ostream& out) {
    fs::path dir = episode_dir(config, e);
    if (!fs::exists(dir / "episode.json")) {
      out << episode_label(e) << ": missing episode artifacts, run evolve first\n";
      return 1;
    }
    Episode episode = read_episode(dir);
    SnapshotStore snapshots;
    int total = 0;
    for (std::size_t k = 0; k < episode.version_count(); ++k) {
      const EnvGraph& graph = episode.version(k);
      Rng rng = Rng(episode_seed(config, e)).fork("taskgen", k);
      std::vector<TaskInstance> tasks =
          generate_tasks(graph, config.tasks_per_version, config.mix, rng,
                         config.max_turns, &snapshots);
      write_tasks((dir / "tasks" / graph.version_id()).string(), tasks);
      total += static_cast<int>(tasks.size());
    }
    out << episode_label(e) << ": " << total << " tasks across "
        << episode.version_count() << " versions\n";
    return 0;
  });
}

int cmd_eval(const PipelineConfig& config, std::ostream& log) {
  PolicyFactory factory = make_policy_factory(config);
  SimConfig sim;
  sim.retry_budget = config.retry_budget;
  sim.reruns = config.reruns;
  sim.memory_capacity = config.memory_k;
  int status = 0;
  for (int e = 0; e < config.episodes; ++e) {
    fs::path dir = episode_dir(config, e);
    try {
      Episode episode = read_episode(dir);
      std::map<std::string, std::vector<TaskInstance>> tasks_by_version;
      for (std::size_t k = 0; k < episode.version_count(); ++k) {
        const std::string& vid = episode.version(k).version_id();
        tasks_by_version[vid] = read_tasks((dir / "tasks" / vid).string());
      }
      EvalReport report = run_episode_eval(episode, tasks_by_version, factory,
                                           config.memory_mode, sim);
      emit_report(report,
                  (dir / "reports" / to_string(config.memory_mode)).string());
      log << episode_label(e) << ": overall C " << report.overall_C << " over "
          << report.task_reports.size() << " runs\n";
    } catch (const std::exception& ex) {
      log << episode_label(e) << ": error: " << ex.what() << "\n";
      status = 1;
    }
  }
  return status;
}

int cmd_validate(const PipelineConfig& config, std::ostream& log) {
  int status = 0;
  fs::path seed_file = fs::path(config.out_dir) / "seed" / "G0.json";
  if (fs::exists(seed_file)) {
    ValidationReport report = validate(read_graph_file(seed_file));
    if (!report.ok()) {
      log << "seed: " << report.summary() << "\n";
      status = 1;
    }
  }
  for (int e = 0; e < config.episodes; ++e) {
    fs::path dir = episode_dir(config, e);
    if (!fs::exists(dir / "episode.json")) {
      log << episode_label(e) << ": missing episode artifacts\n";
      status = 1;
      continue;
    }
    try {
      Episode episode = read_episode(dir);
      ValidationReport report = validate_evolution(episode);
      if (!report.ok()) {
        log << episode_label(e) << ": " << report.summary() << "\n";
        status = 1;
        continue;
      }
      int replayed = 0;
      for (std::size_t k = 0; k < episode.version_count(); ++k) {
        const std::string& vid = episode.version(k).version_id();
        fs::path task_dir = dir / "tasks" / vid;
        if (!fs::exists(task_dir)) continue;
        for (const TaskInstance& task : read_tasks(task_dir.string())) {
          if (task.env_version != vid) {
            log << episode_label(e) << " " << vid << " " << task.task_id
                << ": env_version mismatch\n";
            status = 1;
          } else if (!replay_reference(task)) {
            log << episode_label(e) << " " << vid << " " << task.task_id
                << ": reference replay diverged\n";
            status = 1;
          } else {
            ++replayed;
          }
        }
      }
      log << episode_label(e) << ": ok, " << episode.version_count()
          << " versions, " << replayed << " tasks replayed\n";
    } catch (const std::exception& ex) {
      log << episode_label(e) << ": error: " << ex.what() << "\n";
      status = 1;
    }
  }
  return status;
}

int cmd_report(const PipelineConfig& config, std::ostream& log) {
  const std::string mode = to_string(config.memory_mode);
  std::string merged = "episode_id,version_id,mean_C,mean_T,mean_N_tool\n";
  double sum_C = 0, sum_T = 0, sum_N = 0;
  int rows = 0;
  for (int e = 0; e < config.episodes; ++e) {
    fs::path file = episode_dir(config, e) / "reports" / mode / "report.csv";
    if (!fs::exists(file)) {
      log << episode_label(e) << ": missing " << file.string() << "\n";
      return 1;
    }
    EvalReport report = parse_report_csv(read_text_file(file));
    for (const auto& v : report.versions) {
      merged += episode_label(e) + "," + v.version_id + "," +
                Json(v.mean_C).dump() + "," + Json(v.mean_T).dump() + "," +
                Json(v.mean_N_tool).dump() + "\n";
      sum_C += v.mean_C;
      sum_T += v.mean_T;
      sum_N += v.mean_N_tool;
      ++rows;
    }
  }
  if (rows > 0) {
    merged += "overall,all," + Json(sum_C / rows).dump() + "," +
              Json(sum_T / rows).dump() + "," + Json(sum_N / rows).dump() + "\n";
  }
  fs::path out = fs::path(config.out_dir) / "reports";
  fs::create_directories(out);
  write_text_file(out / ("merged_" + mode + ".csv"), merged);
  log << "report: " << rows << " version rows merged into "
      << (out / ("merged_" + mode + ".csv")).string() << "\n";
  return 0;
}

int run_pipeline(const PipelineConfig& config, std::ostream& log) {
  for (auto* step : {&cmd_seed, &cmd_evolve, &cmd_taskgen, &cmd_eval, &cmd_report}) {
    int status = (*step)(config, log);
    if (status != 0) return status;
  }
  return 0;
}

}  // namespace evobench
