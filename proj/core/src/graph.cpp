#include "evobench/graph.hpp"

#include <algorithm>

#include "evobench/errors.hpp"

namespace evobench {

std::string ValidationReport::summary() const {
  if (violations.empty()) return "ok";
  std::string out;
  for (const auto& v : violations) {
    out += v.code + " (" + v.subject + "): " + v.message + "\n";
  }
  return out;
}

const AttributeNode* EnvGraph::find_node(const NodeId& id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const RelationEdge* EnvGraph::find_edge(const EdgeKey& key) const {
  auto it = edges_.find(key);
  return it == edges_.end() ? nullptr : &it->second;
}

const ToolSpec* EnvGraph::find_tool(const std::string& name) const {
  auto it = tools_.find(name);
  return it == tools_.end() ? nullptr : &it->second;
}

void EnvGraph::add_node(AttributeNode node) {
  auto id = node.id;
  if (!nodes_.emplace(id, std::move(node)).second) {
    throw ConflictError("node already present: " + id.str());
  }
}

void EnvGraph::add_edge(RelationEdge edge) {
  auto key = edge.key();
  if (!edges_.emplace(key, std::move(edge)).second) {
    throw ConflictError("edge already present: " + key.str());
  }
}

void EnvGraph::add_tool(ToolSpec tool) {
  auto name = tool.name;
  if (!tools_.emplace(name, std::move(tool)).second) {
    throw ConflictError("tool already present: " + name);
  }
}

void EnvGraph::remove_node(const NodeId& id) {
  if (nodes_.erase(id) == 0) {
    throw ConflictError("node not present: " + id.str());
  }
}

void EnvGraph::remove_edge(const EdgeKey& key) {
  if (edges_.erase(key) == 0) {
    throw ConflictError("edge not present: " + key.str());
  }
}

void EnvGraph::remove_tool(const std::string& name) {
  if (tools_.erase(name) == 0) {
    throw ConflictError("tool not present: " + name);
  }
}

void EnvGraph::set_edge_tools(const EdgeKey& key, std::vector<std::string> tools) {
  auto it = edges_.find(key);
  if (it == edges_.end()) throw ConflictError("edge not present: " + key.str());
  it->second.tools = std::move(tools);
}

std::set<std::string> EnvGraph::databases() const {
  std::set<std::string> out;
  for (const auto& [id, _] : nodes_) out.insert(id.database);
  return out;
}

std::vector<NodeId> EnvGraph::nodes_of(const std::string& database) const {
  std::vector<NodeId> out;
  for (const auto& [id, _] : nodes_) {
    if (id.database == database) out.push_back(id);
  }
  return out;
}

std::optional<NodeId> EnvGraph::primary_key(const std::string& database) const {
  for (const auto& [id, node] : nodes_) {
    if (id.database == database && node.is_primary_key) return id;
  }
  return std::nullopt;
}

std::vector<const RelationEdge*> EnvGraph::edges_incident(const NodeId& id) const {
  std::vector<const RelationEdge*> out;
  for (const auto& [key, edge] : edges_) {
    if (key.source == id || key.target == id) out.push_back(&edge);
  }
  return out;
}

std::vector<const RelationEdge*> EnvGraph::out_edges(const NodeId& id) const {
  std::vector<const RelationEdge*> out;
  for (const auto& [key, edge] : edges_) {
    if (key.source == id) out.push_back(&edge);
  }
  return out;
}

std::vector<const RelationEdge*> EnvGraph::edges_with_tool(const std::string& name) const {
  std::vector<const RelationEdge*> out;
  for (const auto& [key, edge] : edges_) {
    if (edge.has_tool(name)) out.push_back(&edge);
  }
  return out;
}

namespace {

void check_node_ref(const EnvGraph& g, const NodeId& id, const std::string& code,
                    const std::string& subject, ValidationReport& report) {
  if (!g.has_node(id)) {
    report.violations.push_back(
        {code, subject, "references missing node " + id.str()});
  }
}

}  // namespace

ValidationReport validate(const EnvGraph& graph) {
  ValidationReport report;

  // Per-database primary key count.
  std::map<std::string, int> pk_count;
  for (const auto& [id, node] : graph.nodes()) {
    if (node.is_primary_key) pk_count[id.database]++;
  }
  for (const auto& [db, count] : pk_count) {
    if (count > 1) {
      report.violations.push_back(
          {"duplicate primary key", db,
           "database declares " + std::to_string(count) + " primary keys"});
    }
  }

  for (const auto& [key, edge] : graph.edges()) {
    check_node_ref(graph, edge.source, "dangling edge endpoint", key.str(), report);
    check_node_ref(graph, edge.target, "dangling edge endpoint", key.str(), report);
    if (edge.source == edge.target && edge.relationship != Relationship::HasAttribute) {
      report.violations.push_back(
          {"self loop", key.str(), "self edges are only allowed for has_attribute"});
    }
    for (const auto& tool : edge.tools) {
      if (!graph.has_tool(tool)) {
        report.violations.push_back(
            {"dangling edge tool", key.str(), "lists missing tool " + tool});
      }
    }
  }

  for (const auto& [name, tool] : graph.tools()) {
    if (tool.inputs.empty()) {
      report.violations.push_back({"empty tool inputs", name, "tool declares no inputs"});
    }
    if (tool.outputs.empty()) {
      report.violations.push_back({"empty tool outputs", name, "tool declares no outputs"});
    }
    for (const auto& id : tool.inputs) {
      check_node_ref(graph, id, "dangling tool input", name, report);
    }
    for (const auto& id : tool.outputs) {
      check_node_ref(graph, id, "dangling tool output", name, report);
    }
    for (const auto& id : tool.optional_inputs) {
      bool listed = false;
      for (const auto& in : tool.inputs) {
        if (in == id) { listed = true; break; }
      }
      if (!listed) {
        report.violations.push_back(
            {"optional input not an input", name,
             "optional input " + id.str() + " missing from inputs"});
      }
    }
    if (tool.kind == ToolKind::Read) {
      for (const auto& in : tool.inputs) {
        for (const auto& out : tool.outputs) {
          if (in == out) {
            report.violations.push_back(
                {"read tool io overlap", name,
                 "READ tool both reads and returns " + in.str()});
          }
        }
      }
    }
  }

  // Foreign keys must agree with the primary key they reference. The
  // reference is the edge fk -> pk with relationship `references`.
  for (const auto& [key, edge] : graph.edges()) {
    if (edge.relationship != Relationship::References) continue;
    const auto* src = graph.find_node(edge.source);
    const auto* dst = graph.find_node(edge.target);
    if (!src || !dst) continue;
    if (src->is_foreign_key && dst->is_primary_key) {
      if (src->value_type.kind != dst->value_type.kind &&
          !(src->value_type.kind == ValueKind::StringList &&
            dst->value_type.kind == ValueKind::String)) {
        report.violations.push_back(
            {"foreign key type mismatch", key.str(),
             "fk " + src->value_type.str() + " vs pk " + dst->value_type.str()});
      }
    }
  }

  return report;
}

}  // namespace evobench
