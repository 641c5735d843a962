#pragma once

#include <string>
#include <vector>

#include "evobench/graph.hpp"

namespace evobench {

/// Narrative and machine-readable summary attached to one evolution step.
/// metadata mirrors the owning delta: new_tools for completion/saturation,
/// deprecated_tools plus removed_connections/removed_data_points/workaround
/// for deprecation.
struct EvolutionContext {
  Strategy strategy = Strategy::Completion;
  std::string title;
  std::string narrative;
  Json metadata = Json::object();

  bool operator==(const EvolutionContext&) const = default;
};

/// One graph transformation. Removal entries carry the full element (the
/// delta is self-describing); additions likewise. Disjointness is by value:
/// an in-place edit is expressed as remove(old) + add(new).
struct GraphDelta {
  Strategy strategy = Strategy::Completion;
  std::vector<AttributeNode> added_nodes;
  std::vector<AttributeNode> removed_nodes;
  std::vector<RelationEdge> added_edges;
  std::vector<RelationEdge> removed_edges;
  std::vector<ToolSpec> added_tools;
  std::vector<ToolSpec> removed_tools;
  EvolutionContext context;

  bool operator==(const GraphDelta&) const = default;

  bool empty() const {
    return added_nodes.empty() && removed_nodes.empty() && added_edges.empty() &&
           removed_edges.empty() && added_tools.empty() && removed_tools.empty();
  }
};

/// "G3" -> "G4"; ids without a trailing integer get "_next" appended.
std::string next_version_id(const std::string& version_id);

/// Applies removals (edges, tools, nodes) then additions (nodes, edges,
/// tools) to a copy of `graph`. Throws ConflictError naming the first
/// offending element. The result's version_id is next_version_id(parent) and
/// its metadata records parent and strategy.
EnvGraph apply_delta(const EnvGraph& graph, const GraphDelta& delta);

/// Structural difference old -> new. Satisfies
/// apply_delta(old, diff(old, new)) isomorphic to new. The strategy label is
/// inferred from the shape of the change (removal-only: deprecation;
/// tool/edge additions only: saturation; otherwise completion).
GraphDelta diff(const EnvGraph& old_graph, const EnvGraph& new_graph);

}  // namespace evobench
