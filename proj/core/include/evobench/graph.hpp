#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "evobench/types.hpp"

namespace evobench {

/// One schema attribute of one database.
struct AttributeNode {
  NodeId id;
  ValueType value_type;
  std::string description;
  bool is_primary_key = false;
  bool is_foreign_key = false;
  bool modifiable = true;
  /// Closed vocabulary for enum-like attributes; empty means unconstrained.
  std::vector<Json> allowed_values;

  bool operator==(const AttributeNode&) const = default;
};

/// Callable capability. Inputs and outputs are node ids; an input listed in
/// optional_inputs may be omitted from a call. Shortcut tools added by
/// saturation keep the walk that discovered them in discovery_path, and the
/// runtime joins along exactly that path.
struct ToolSpec {
  std::string name;
  ToolKind kind = ToolKind::Read;
  std::vector<NodeId> inputs;
  std::vector<NodeId> outputs;
  std::vector<NodeId> optional_inputs;
  std::vector<NodeId> discovery_path;
  std::string description;

  bool operator==(const ToolSpec&) const = default;

  bool is_optional_input(const NodeId& id) const {
    for (const auto& n : optional_inputs)
      if (n == id) return true;
    return false;
  }
};

/// Identity of an edge: parallel edges may differ only in relationship type.
struct EdgeKey {
  NodeId source;
  NodeId target;
  Relationship relationship = Relationship::References;

  auto operator<=>(const EdgeKey&) const = default;

  std::string str() const {
    return source.str() + " -> " + target.str() + " [" + to_string(relationship) + "]";
  }
};

/// Typed relation between two attribute nodes, carrying the tools that
/// operate along it.
struct RelationEdge {
  NodeId source;
  NodeId target;
  Relationship relationship = Relationship::References;
  Cardinality cardinality = Cardinality::OneToMany;
  std::vector<std::string> tools;
  std::string description;

  bool operator==(const RelationEdge&) const = default;

  EdgeKey key() const { return EdgeKey{source, target, relationship}; }

  bool has_tool(const std::string& name) const {
    for (const auto& t : tools)
      if (t == name) return true;
    return false;
  }
};

struct Violation {
  std::string code;     // stable machine label, e.g. "dangling tool input"
  std::string subject;  // offending element, e.g. "get_cart"
  std::string message;
};

/// Violations are data, not exceptions: an invalid graph is something the
/// pipeline inspects and reports on.
struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

/// One immutable-by-convention environment version: attribute nodes, typed
/// edges, and the tool surface. Storage is ordered maps throughout so equal
/// graphs serialize byte-identically.
class EnvGraph {
 public:
  using NodeMap = std::map<NodeId, AttributeNode>;
  using EdgeMap = std::map<EdgeKey, RelationEdge>;
  using ToolMap = std::map<std::string, ToolSpec>;

  const std::string& version_id() const { return version_id_; }
  void set_version_id(std::string v) { version_id_ = std::move(v); }

  const std::map<std::string, std::string>& metadata() const { return metadata_; }
  void set_metadata(const std::string& key, const std::string& value) {
    metadata_[key] = value;
  }

  const NodeMap& nodes() const { return nodes_; }
  const EdgeMap& edges() const { return edges_; }
  const ToolMap& tools() const { return tools_; }

  bool has_node(const NodeId& id) const { return nodes_.count(id) != 0; }
  bool has_edge(const EdgeKey& key) const { return edges_.count(key) != 0; }
  bool has_tool(const std::string& name) const { return tools_.count(name) != 0; }

  const AttributeNode* find_node(const NodeId& id) const;
  const RelationEdge* find_edge(const EdgeKey& key) const;
  const ToolSpec* find_tool(const std::string& name) const;

  /// Builders. Throw ConflictError on duplicate identity; removal of a
  /// missing element throws too.
  void add_node(AttributeNode node);
  void add_edge(RelationEdge edge);
  void add_tool(ToolSpec tool);
  void remove_node(const NodeId& id);
  void remove_edge(const EdgeKey& key);
  void remove_tool(const std::string& name);

  /// Replaces an edge's tool list in place (same identity).
  void set_edge_tools(const EdgeKey& key, std::vector<std::string> tools);

  std::set<std::string> databases() const;
  std::vector<NodeId> nodes_of(const std::string& database) const;
  /// The database's primary-key node, if it has one.
  std::optional<NodeId> primary_key(const std::string& database) const;

  std::vector<const RelationEdge*> edges_incident(const NodeId& id) const;
  std::vector<const RelationEdge*> out_edges(const NodeId& id) const;
  std::vector<const RelationEdge*> edges_with_tool(const std::string& name) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t tool_count() const { return tools_.size(); }

 private:
  std::string version_id_;
  std::map<std::string, std::string> metadata_;
  NodeMap nodes_;
  EdgeMap edges_;
  ToolMap tools_;
};

/// Structural integrity check; see Violation. Never throws.
ValidationReport validate(const EnvGraph& graph);

}  // namespace evobench
