#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "evobench/graph.hpp"
#include "evobench/rng.hpp"
#include "evobench/sandbox.hpp"

namespace evobench {

/// Relative weights for the easy/medium/hard split.
struct DifficultyMix {
  double easy = 1.0;
  double medium = 1.0;
  double hard = 1.0;
};

/// count split by mix, rounded to nearest with the remainder landing on easy.
/// Returned as {easy, medium, hard}.
std::array<int, 3> difficulty_counts(int count, const DifficultyMix& mix);

/// One required fact pattern: wildcard patterns accept any value for the node.
struct FactPattern {
  NodeId node;
  Json value;
  bool wildcard = false;

  bool operator==(const FactPattern&) const = default;
  bool operator<(const FactPattern& o) const;
};

/// What the simulated user says at turn t and what must be true afterwards.
struct StateInstruction {
  int turn = 0;
  std::string utterance;
  std::vector<FactPattern> criteria;  // never empty
};

struct ReferenceTurn {
  ToolCall action;
  std::set<Fact> facts;      // this turn's knowledge delta
  std::set<NodeId> active;   // active subgraph after the turn
};

struct ReferenceTrajectory {
  std::set<NodeId> initial_active;
  std::vector<ReferenceTurn> turns;
  std::set<Fact> final_knowledge;
};

struct TaskScenario {
  std::string text;
  std::vector<EntitySpec> prerequisites;
};

/// Where a planned argument's value comes from at walk time.
enum class ArgSource {
  Focal,    // read off the focal entity in the materialized store
  Fact,     // surfaced by an earlier tool result
  Literal,  // chosen by the (simulated) user; embedded in the utterance
};

struct PlannedArg {
  ArgSource source = ArgSource::Focal;
  Json literal;  // Literal source only
};

struct PlannedCall {
  std::string tool;
  std::map<NodeId, PlannedArg> args;
};

/// Generation-time plan: the tool chain the oracle will follow plus the
/// prerequisites that make it land. Only goal/text/prerequisites survive
/// into the task document.
struct ScenarioPlan {
  std::string goal;
  std::string text;
  std::vector<EntitySpec> prerequisites;
  std::vector<PlannedCall> steps;
};

struct TaskInstance {
  std::string task_id;
  std::string env_version;
  Difficulty difficulty = Difficulty::Easy;
  std::string goal;
  TaskScenario scenario;
  EnvGraph subgraph;
  std::string snapshot_token;
  Json store_dump;
  std::vector<StateInstruction> instructions;
  ReferenceTrajectory reference;
};

/// Connected task scope with difficulty-scaled size: easy 4-6 nodes within at
/// most two databases, medium 7-10, hard 11-16 across at least three. Retries
/// internally until the scope carries at least one tool and a primary key for
/// every database it touches; NoToolsInScopeError when the budget runs out.
EnvGraph sample_task_scope(const EnvGraph& graph, Difficulty difficulty, Rng& rng);

/// Seeded goal/scenario construction: a tool chain of at least `min_steps`
/// calls in which every argument is either user-given or surfaced by an
/// earlier call, plus the focal entities that make the chain land. Requires
/// one WRITE or two READ tools in scope (PreconditionError otherwise);
/// ProposerError when no viable chain exists.
ScenarioPlan synthesize_scenario(const EnvGraph& subgraph, int min_steps, Rng& rng);

struct WalkOutput {
  std::vector<StateInstruction> instructions;
  ReferenceTrajectory reference;
};

/// Oracle walk over the materialized scope: executes the planned chain under
/// frontier rules (a tool is eligible once its required inputs are known or
/// revealed in the turn's utterance), folding knowledge and expanding the
/// active subgraph each turn. Throws WalkStuckError when the plan's next tool
/// is not eligible or a call comes back empty.
WalkOutput agentic_walk(const EnvGraph& subgraph, SandboxState& state,
                        const ScenarioPlan& plan, int max_turns, Rng& rng);

/// Full per-version synthesis: difficulty split, per-slot resampling (5
/// attempts), minimum reference length per difficulty, and a replay check of
/// every emitted task. Snapshot tokens are registered in `snapshots` when one
/// is supplied.
std::vector<TaskInstance> generate_tasks(const EnvGraph& env, int count,
                                         const DifficultyMix& mix, Rng& rng,
                                         int max_turns = 12,
                                         SnapshotStore* snapshots = nullptr);

/// Restore the task's sandbox from its embedded store dump.
SandboxState restore_task_state(const TaskInstance& task);

/// Replay the reference trajectory on a fresh restore; true when the folded
/// knowledge reproduces the stored final knowledge exactly.
bool replay_reference(const TaskInstance& task);

Json pattern_to_json(const FactPattern& p);
FactPattern pattern_from_json(const Json& j);
Json task_to_json(const TaskInstance& task);
TaskInstance task_from_json(const Json& j);

void write_tasks(const std::string& dir, const std::vector<TaskInstance>& tasks);
std::vector<TaskInstance> read_tasks(const std::string& dir);

}  // namespace evobench
