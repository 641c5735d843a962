#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "evobench/graph.hpp"
#include "evobench/rng.hpp"

namespace evobench {

/// One stored record. `values` holds exactly the attributes the sandbox
/// graph declares for the database; the primary key is always present.
struct EntityInstance {
  std::string database;
  std::map<std::string, Json> values;

  bool operator==(const EntityInstance&) const = default;

  const Json* find(const std::string& attribute) const {
    auto it = values.find(attribute);
    return it == values.end() ? nullptr : &it->second;
  }
};

/// A requested entity: stated values are kept verbatim, the rest is
/// synthesized.
struct EntitySpec {
  std::string database;
  std::map<std::string, Json> values;
};

struct ToolCall {
  std::string tool;
  std::map<NodeId, Json> args;
  int turn = 0;

  bool operator==(const ToolCall&) const = default;
};

enum class ToolErrorKind : std::uint8_t {
  None,
  UnknownTool,
  DeprecatedTool,
  MissingInput,
  NotFound,
};

std::string to_string(ToolErrorKind k);

/// One knowledge triple: an attribute value observed on one entity.
struct Fact {
  NodeId node;
  Json entity_key;
  Json value;

  bool operator==(const Fact& o) const {
    return node == o.node && entity_key == o.entity_key && value == o.value;
  }
  bool operator<(const Fact& o) const {
    if (node != o.node) return node < o.node;
    if (entity_key != o.entity_key) return entity_key.dump() < o.entity_key.dump();
    return value.dump() < o.value.dump();
  }
};

/// One result row: values restricted to the tool's outputs, entity_key the
/// owning entity's primary-key value.
struct ToolRecord {
  std::string database;
  Json entity_key;
  std::map<std::string, Json> values;

  bool operator==(const ToolRecord&) const = default;
};

/// Errors are results, not exceptions: agents under test are expected to see
/// and react to them.
struct ToolResult {
  bool ok = true;
  ToolErrorKind error = ToolErrorKind::None;
  std::string message;
  std::string workaround_hint;  // set on DeprecatedTool errors
  std::vector<ToolRecord> records;
  std::set<Fact> facts;

  bool operator==(const ToolResult&) const = default;
};

struct LogEntry {
  ToolCall call;
  ToolResult result;
};

/// An executable environment: entity store conforming to one graph version.
/// `deprecated` carries the episode lineage (tools retired by an ancestor
/// version, with their workaround hints) so a stale call can be told apart
/// from a nonsense one.
struct SandboxState {
  EnvGraph graph;
  std::map<std::string, std::vector<EntityInstance>> store;
  std::vector<LogEntry> call_log;
  std::map<std::string, std::string> deprecated;

  const EntityInstance* find_entity(const std::string& database,
                                    const Json& pk_value) const;
  EntityInstance* find_entity(const std::string& database, const Json& pk_value);
};

/// Builds a store around the prerequisites: stated entities are created
/// verbatim, demanded foreign-key chains are linked (stubs created where a
/// reference dangles), parent list attributes are back-filled, and every
/// remaining attribute is filled by seeded type-driven synthesis. Throws
/// SchemaMismatchError when a prerequisite names an unknown database or
/// attribute, states a value of the wrong type, or the final store fails
/// conformance.
SandboxState materialize(const EnvGraph& graph,
                         const std::vector<EntitySpec>& prerequisites, Rng& rng);

/// Interprets one call from the tool's spec and the graph's edges. READ
/// filters on the inputs and joins across databases (stored discovery path
/// first, otherwise shortest predicate-edge route, ties lexicographic) and
/// never changes the store. WRITE creates, updates, or edits list
/// memberships depending on the tool's verb and signature; it never deletes
/// entities. The call and its result are appended to the log either way.
ToolResult execute_tool(SandboxState& state, const ToolCall& call);

/// One Fact per (record, attribute) with a non-null value.
std::set<Fact> extract_facts(const std::vector<ToolRecord>& records);

/// Conformance audit: schema agreement, primary-key uniqueness, foreign-key
/// resolution (brute force over the store). Empty means clean.
std::vector<std::string> store_problems(const SandboxState& state);

/// The primary-key node a foreign key points at through a join-predicate
/// edge, or null when the graph carries no such edge for it.
const AttributeNode* fk_target(const EnvGraph& graph, const NodeId& node);

Json fact_to_json(const Fact& fact);
Fact fact_from_json(const Json& doc);
Json call_to_json(const ToolCall& call);
ToolCall call_from_json(const Json& doc);
Json result_to_json(const ToolResult& result);
ToolResult result_from_json(const Json& doc);

/// Full state document, graph included; restoring from it is exact.
Json state_to_json(const SandboxState& state);
SandboxState state_from_json(const Json& doc);

/// Store-only view `{database: [entity, ...]}`, entities ordered by primary
/// key value.
Json store_dump_json(const SandboxState& state);

/// One "{call, result}" JSON object per line.
std::string call_log_jsonl(const SandboxState& state);

/// Content-addressed immutable snapshots. Tokens are derived from the
/// serialized state, so equal states share a token and a rerun of the same
/// pipeline mints the same tokens.
class SnapshotStore {
 public:
  std::string snapshot(const SandboxState& state);
  /// Throws UnknownTokenError for a token this store never minted.
  SandboxState restore(const std::string& token) const;
  bool contains(const std::string& token) const { return snaps_.count(token) != 0; }

 private:
  std::map<std::string, Json> snaps_;
};

}  // namespace evobench
