#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "evobench/evolve.hpp"
#include "evobench/taskgen.hpp"

namespace evobench {

/// One transcript event. Roles: "user" (simulator utterance), "agent" (a
/// tool call or a reply), "tool" (execution result).
struct ConversationEvent {
  std::string role;
  int turn = 0;
  Json payload;
};

Json event_to_json(const ConversationEvent& e);
ConversationEvent event_from_json(const Json& j);

/// The exact information surface a policy sees: utterances, the tool
/// catalog, prior calls and their results, and whatever it remembered.
/// Success criteria and the reference trajectory are never part of it.
class AgentPolicy {
 public:
  struct Action {
    std::optional<ToolCall> call;
    std::optional<std::string> reply;
  };

  virtual ~AgentPolicy() = default;
  virtual void reset(const Json& memory_context) = 0;
  virtual Action step(const std::vector<ConversationEvent>& conversation,
                      const Json& tool_catalog,
                      const std::vector<ToolResult>& last_results) = 0;
};

/// Replays a task's reference trajectory one call per turn: the ceiling
/// every generated task must reach.
class ScriptedOraclePolicy : public AgentPolicy {
 public:
  explicit ScriptedOraclePolicy(const TaskInstance& task);
  void reset(const Json& memory_context) override;
  Action step(const std::vector<ConversationEvent>& conversation,
              const Json& tool_catalog,
              const std::vector<ToolResult>& last_results) override;

 private:
  std::vector<ToolCall> actions_;
  std::size_t next_ = 0;
  bool called_this_turn_ = false;
};

/// Replies politely and never touches a tool: the floor.
class NullPolicy : public AgentPolicy {
 public:
  void reset(const Json& memory_context) override;
  Action step(const std::vector<ConversationEvent>& conversation,
              const Json& tool_catalog,
              const std::vector<ToolResult>& last_results) override;
};

/// Records every payload it is shown, bit for bit; used to prove the
/// harness keeps policies blind to criteria.
class RecordingProbePolicy : public AgentPolicy {
 public:
  void reset(const Json& memory_context) override;
  Action step(const std::vector<ConversationEvent>& conversation,
              const Json& tool_catalog,
              const std::vector<ToolResult>& last_results) override;

  std::vector<Json> seen;
};

enum class MemoryMode : std::uint8_t { Baseline, History, Reflection };

std::string to_string(MemoryMode m);
MemoryMode parse_memory_mode(const std::string& s);

/// Bounded FIFO of per-task carry-over. Baseline keeps nothing; history
/// keeps whole transcripts; reflection keeps structural digests.
struct MemoryModule {
  MemoryMode mode = MemoryMode::Baseline;
  int capacity = 5;
  std::deque<Json> entries;

  void remember(Json entry);
  Json context() const;
};

struct TurnOutcome {
  int turn = 0;
  int satisfied = 0;
  int attempts = 0;
  int tool_calls = 0;
};

struct TaskReport {
  std::string task_id;
  std::string version_id;
  double C = 0.0;
  int T = 0;
  int N_tool = 0;
  std::vector<TurnOutcome> turns;
  std::vector<ConversationEvent> transcript;
};

struct VersionSummary {
  std::string version_id;
  double mean_C = 0.0;
  double mean_T = 0.0;
  double mean_N_tool = 0.0;
  int runs = 0;
};

struct EvalReport {
  std::string strategy;
  std::string policy_label;
  std::vector<VersionSummary> versions;
  double overall_C = 0.0;
  double overall_T = 0.0;
  double overall_N_tool = 0.0;
  std::vector<TaskReport> task_reports;
};

struct SimConfig {
  /// Clarification retries per state before it is marked failed.
  int retry_budget = 2;
  /// Policy steps allowed within one attempt before it counts as malformed.
  int max_steps_per_attempt = 16;
  /// Fresh-snapshot repeats of every task.
  int reruns = 1;
  /// Conversations the memory module retains (symbol k).
  int memory_capacity = 5;
  /// Tools retired by earlier evolution steps, name -> workaround hint.
  std::map<std::string, std::string> deprecated;
  /// Handed to the policy's reset at task start.
  Json memory_context;
};

/// Tool surface the policy is shown: name, kind, signature, description.
/// Built from the graph alone.
Json tool_catalog(const EnvGraph& graph);

/// True iff every pattern holds: wildcards need any fact with that node in
/// `knowledge`; exact patterns need an equal-valued fact, or the literal
/// rendered verbatim inside `reply_text`.
bool check_state_success(const std::vector<FactPattern>& criteria,
                         const std::set<Fact>& knowledge,
                         const std::string& reply_text);

/// State-gated simulation of one task against one policy.
TaskReport run_task(const TaskInstance& task, AgentPolicy& policy,
                    const SimConfig& config);

/// Tools retired by deprecation steps up to and including version k,
/// name -> workaround hint.
std::map<std::string, std::string> deprecated_lineage(const Episode& episode,
                                                      std::size_t k);

using PolicyFactory = std::function<std::unique_ptr<AgentPolicy>(const TaskInstance&)>;

/// Walks versions in order and tasks in index order, carrying memory across
/// tasks per `strategy`. Tasks must exist for every version id.
EvalReport run_episode_eval(
    const Episode& episode,
    const std::map<std::string, std::vector<TaskInstance>>& tasks_by_version,
    const PolicyFactory& factory, MemoryMode strategy, SimConfig config);

/// Structural digest of a transcript: per-tool ok/error tallies, deprecated
/// tools encountered with their hints, final C. Never exceeds 1 KB.
Json summarize_reflection(const std::vector<ConversationEvent>& transcript,
                          double final_C);

/// One JSON object per line: {role, turn, payload}.
std::string transcript_jsonl(const TaskReport& report);

/// version_id,mean_C,mean_T,mean_N_tool rows plus an "overall" row.
std::string report_csv(const EvalReport& report);

/// Inverse of report_csv over the aggregate columns.
EvalReport parse_report_csv(const std::string& text);

/// Writes report.csv and one <task_id>_r<rerun>.jsonl transcript per run
/// into `dir`.
void emit_report(const EvalReport& report, const std::string& dir);

}  // namespace evobench
