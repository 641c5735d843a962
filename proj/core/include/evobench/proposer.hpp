#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "evobench/graph.hpp"
#include "evobench/rng.hpp"

namespace evobench {

/// A completion proposal: one or more new databases plus the nodes, edges,
/// and tools that wire them into the existing graph.
struct CompletionProposal {
  std::string task_name;
  std::string user_story;
  std::vector<std::string> capability_gaps;
  std::vector<std::string> new_databases;
  std::vector<AttributeNode> new_nodes;
  std::vector<RelationEdge> new_edges;
  std::vector<ToolSpec> new_tools;
  std::string rationale;
};

/// One walk-discovered shortcut: the discovery path plus the designed tool.
/// proposed inputs/outputs are nodes of the path.
struct ShortcutCandidate {
  std::vector<NodeId> path;
  std::string tool_name;
  std::vector<NodeId> proposed_inputs;
  std::vector<NodeId> proposed_outputs;
  std::string description;
  std::string rationale;
  std::vector<std::string> use_cases;
};

enum class CandidateKind : std::uint8_t { Bridge, Database, PeripheralEdge };

std::string to_string(CandidateKind k);

/// One deprecation opportunity. affected_tools is exactly the set of tools
/// that reference a removed node or ride a removed edge.
struct DeprecationCandidate {
  std::string candidate_id;
  CandidateKind kind = CandidateKind::Database;
  std::vector<AttributeNode> removed_nodes;
  std::vector<RelationEdge> removed_edges;
  std::vector<std::string> affected_tools;
};

enum class ChallengeLevel : std::uint8_t { Easy, Medium, Hard, Extreme };

std::string to_string(ChallengeLevel c);
ChallengeLevel parse_challenge(const std::string& s);

struct DeprecationDecision {
  std::string candidate_id;
  std::string reason;
  std::string impact_summary;
  ChallengeLevel challenge = ChallengeLevel::Medium;
  std::string workaround_hint;
};

/// Strategy decision boundary. Implementations must be deterministic given
/// the rng they are handed; the default is a seeded template bank, and an
/// HTTP-backed variant lives in adapters.
class Proposer {
 public:
  virtual ~Proposer() = default;

  virtual CompletionProposal propose_completion(const EnvGraph& graph, Rng& rng) = 0;

  /// Chooses up to `count` of the discovered paths and designs their tools.
  virtual std::vector<ShortcutCandidate> select_shortcuts(
      const EnvGraph& graph, const std::vector<std::vector<NodeId>>& paths, int count,
      Rng& rng) = 0;

  virtual DeprecationDecision select_deprecation(
      const EnvGraph& graph, const std::vector<DeprecationCandidate>& candidates,
      Rng& rng) = 0;
};

/// Deterministic proposer: parameterized feature templates for completion,
/// path-length-then-name ranking for shortcuts, and a challenge ladder
/// (medium, hard, easy, extreme) over tool-affecting candidates for
/// deprecation.
class SeededProposer : public Proposer {
 public:
  CompletionProposal propose_completion(const EnvGraph& graph, Rng& rng) override;
  std::vector<ShortcutCandidate> select_shortcuts(
      const EnvGraph& graph, const std::vector<std::vector<NodeId>>& paths, int count,
      Rng& rng) override;
  DeprecationDecision select_deprecation(
      const EnvGraph& graph, const std::vector<DeprecationCandidate>& candidates,
      Rng& rng) override;
};

/// Replays canned decisions; used to isolate the pipeline from proposer
/// behavior and to reproduce published evolution cases exactly.
class ReplayProposer : public Proposer {
 public:
  std::vector<CompletionProposal> completions;
  std::vector<ShortcutCandidate> shortcuts;
  std::optional<std::string> deprecation_target;  // candidate_id to pick
  std::optional<DeprecationDecision> deprecation;

  CompletionProposal propose_completion(const EnvGraph& graph, Rng& rng) override;
  std::vector<ShortcutCandidate> select_shortcuts(
      const EnvGraph& graph, const std::vector<std::vector<NodeId>>& paths, int count,
      Rng& rng) override;
  DeprecationDecision select_deprecation(
      const EnvGraph& graph, const std::vector<DeprecationCandidate>& candidates,
      Rng& rng) override;
};

/// Canned decisions reproducing the published Cart retirement and the
/// order-refund shortcut on the seed environment.
DeprecationDecision cart_retirement_decision();
CompletionProposal price_alert_proposal(const EnvGraph& seed_graph);

}  // namespace evobench
