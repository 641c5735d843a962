#include "evobench/delta.hpp"

#include <cctype>

#include "evobench/errors.hpp"

namespace evobench {

std::string next_version_id(const std::string& version_id) {
  std::size_t pos = version_id.size();
  while (pos > 0 && std::isdigit(static_cast<unsigned char>(version_id[pos - 1]))) {
    --pos;
  }
  if (pos == version_id.size()) return version_id + "_next";
  long n = std::stol(version_id.substr(pos));
  return version_id.substr(0, pos) + std::to_string(n + 1);
}

EnvGraph apply_delta(const EnvGraph& graph, const GraphDelta& delta) {
  EnvGraph out = graph;

  // Removals first so edits (remove old + add new under one identity) work.
  for (const auto& edge : delta.removed_edges) {
    if (!out.has_edge(edge.key())) {
      throw ConflictError("delta removes missing edge " + edge.key().str());
    }
    out.remove_edge(edge.key());
  }
  for (const auto& tool : delta.removed_tools) {
    if (!out.has_tool(tool.name)) {
      throw ConflictError("delta removes missing tool " + tool.name);
    }
    out.remove_tool(tool.name);
  }
  for (const auto& node : delta.removed_nodes) {
    if (!out.has_node(node.id)) {
      throw ConflictError("delta removes missing node " + node.id.str());
    }
    out.remove_node(node.id);
  }

  for (const auto& node : delta.added_nodes) {
    if (out.has_node(node.id)) {
      throw ConflictError("delta adds existing node " + node.id.str());
    }
    out.add_node(node);
  }
  for (const auto& edge : delta.added_edges) {
    if (out.has_edge(edge.key())) {
      throw ConflictError("delta adds existing edge " + edge.key().str());
    }
    out.add_edge(edge);
  }
  for (const auto& tool : delta.added_tools) {
    if (out.has_tool(tool.name)) {
      throw ConflictError("delta adds existing tool " + tool.name);
    }
    out.add_tool(tool);
  }

  out.set_version_id(next_version_id(graph.version_id()));
  out.set_metadata("parent", graph.version_id());
  out.set_metadata("strategy", to_string(delta.strategy));
  return out;
}

GraphDelta diff(const EnvGraph& old_graph, const EnvGraph& new_graph) {
  GraphDelta d;

  for (const auto& [id, node] : old_graph.nodes()) {
    const auto* other = new_graph.find_node(id);
    if (!other) {
      d.removed_nodes.push_back(node);
    } else if (!(*other == node)) {
      d.removed_nodes.push_back(node);
      d.added_nodes.push_back(*other);
    }
  }
  for (const auto& [id, node] : new_graph.nodes()) {
    if (!old_graph.has_node(id)) d.added_nodes.push_back(node);
  }

  for (const auto& [key, edge] : old_graph.edges()) {
    const auto* other = new_graph.find_edge(key);
    if (!other) {
      d.removed_edges.push_back(edge);
    } else if (!(*other == edge)) {
      d.removed_edges.push_back(edge);
      d.added_edges.push_back(*other);
    }
  }
  for (const auto& [key, edge] : new_graph.edges()) {
    if (!old_graph.has_edge(key)) d.added_edges.push_back(edge);
  }

  for (const auto& [name, tool] : old_graph.tools()) {
    const auto* other = new_graph.find_tool(name);
    if (!other) {
      d.removed_tools.push_back(tool);
    } else if (!(*other == tool)) {
      d.removed_tools.push_back(tool);
      d.added_tools.push_back(*other);
    }
  }
  for (const auto& [name, tool] : new_graph.tools()) {
    if (!old_graph.has_tool(name)) d.added_tools.push_back(tool);
  }

  bool adds = !d.added_nodes.empty() || !d.added_edges.empty() || !d.added_tools.empty();
  bool removes =
      !d.removed_nodes.empty() || !d.removed_edges.empty() || !d.removed_tools.empty();
  if (removes && !adds) {
    d.strategy = Strategy::Deprecation;
  } else if (adds && !removes && d.added_nodes.empty()) {
    d.strategy = Strategy::Saturation;
  } else {
    d.strategy = Strategy::Completion;
  }
  d.context.strategy = d.strategy;
  return d;
}

}  // namespace evobench
