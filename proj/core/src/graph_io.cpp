#include "evobench/graph_io.hpp"

#include <fstream>
#include <sstream>

#include "evobench/errors.hpp"

namespace evobench {

namespace {

const Json& require(const Json& doc, const std::string& key, const std::string& where) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(where, "missing field \"" + key + "\"");
  return *it;
}

std::string require_string(const Json& doc, const std::string& key,
                           const std::string& where) {
  const Json& v = require(doc, key, where);
  if (!v.is_string()) throw ParseError(where + "/" + key, "expected string");
  return v.get<std::string>();
}

bool require_bool(const Json& doc, const std::string& key, const std::string& where) {
  const Json& v = require(doc, key, where);
  if (!v.is_boolean()) throw ParseError(where + "/" + key, "expected boolean");
  return v.get<bool>();
}

std::vector<NodeId> node_list_from_json(const Json& arr, const std::string& where) {
  if (!arr.is_array()) throw ParseError(where, "expected array of node ids");
  std::vector<NodeId> out;
  for (const auto& v : arr) {
    if (!v.is_string()) throw ParseError(where, "expected \"Database.attribute\" strings");
    out.push_back(NodeId::parse(v.get<std::string>()));
  }
  return out;
}

Json node_list_to_json(const std::vector<NodeId>& ids) {
  Json arr = Json::array();
  for (const auto& id : ids) arr.push_back(id.str());
  return arr;
}

}  // namespace

Json node_to_json(const AttributeNode& node) {
  Json j;
  j["name"] = node.id.attribute;
  j["type"] = node.value_type.str();
  j["description"] = node.description;
  j["is_primary_key"] = node.is_primary_key;
  j["is_foreign_key"] = node.is_foreign_key;
  j["modifiable"] = node.modifiable;
  if (!node.allowed_values.empty()) j["allowed_values"] = node.allowed_values;
  return j;
}

AttributeNode node_from_json(const Json& doc, const std::string& database) {
  const std::string where = "databases/" + database;
  AttributeNode node;
  node.id = NodeId{database, require_string(doc, "name", where)};
  node.value_type = ValueType::parse(require_string(doc, "type", where));
  node.description = require_string(doc, "description", where);
  node.is_primary_key = require_bool(doc, "is_primary_key", where);
  node.is_foreign_key = require_bool(doc, "is_foreign_key", where);
  node.modifiable = require_bool(doc, "modifiable", where);
  if (doc.contains("allowed_values")) {
    const Json& av = doc["allowed_values"];
    if (!av.is_array()) throw ParseError(where + "/allowed_values", "expected array");
    node.allowed_values.assign(av.begin(), av.end());
  }
  return node;
}

Json edge_to_json(const RelationEdge& edge) {
  Json j;
  j["source"] = edge.source.str();
  j["target"] = edge.target.str();
  j["relationship_type"] = to_string(edge.relationship);
  j["cardinality"] = to_string(edge.cardinality);
  j["tools"] = edge.tools;
  j["description"] = edge.description;
  return j;
}

RelationEdge edge_from_json(const Json& doc) {
  const std::string where = "edges";
  RelationEdge edge;
  edge.source = NodeId::parse(require_string(doc, "source", where));
  edge.target = NodeId::parse(require_string(doc, "target", where));
  edge.relationship = parse_relationship(require_string(doc, "relationship_type", where));
  edge.cardinality = parse_cardinality(require_string(doc, "cardinality", where));
  const Json& tools = require(doc, "tools", where);
  if (!tools.is_array()) throw ParseError(where + "/tools", "expected array");
  edge.tools.assign(tools.begin(), tools.end());
  edge.description = require_string(doc, "description", where);
  return edge;
}

Json tool_to_json(const ToolSpec& tool) {
  Json j;
  j["name"] = tool.name;
  j["kind"] = to_string(tool.kind);
  j["inputs"] = node_list_to_json(tool.inputs);
  j["outputs"] = node_list_to_json(tool.outputs);
  if (!tool.optional_inputs.empty()) {
    j["optional_inputs"] = node_list_to_json(tool.optional_inputs);
  }
  if (!tool.discovery_path.empty()) {
    j["discovery_path"] = node_list_to_json(tool.discovery_path);
  }
  j["description"] = tool.description;
  return j;
}

ToolSpec tool_from_json(const Json& doc) {
  const std::string where = "tools";
  ToolSpec tool;
  tool.name = require_string(doc, "name", where);
  tool.kind = parse_tool_kind(require_string(doc, "kind", where));
  tool.inputs = node_list_from_json(require(doc, "inputs", where), where + "/inputs");
  tool.outputs = node_list_from_json(require(doc, "outputs", where), where + "/outputs");
  if (doc.contains("optional_inputs")) {
    tool.optional_inputs =
        node_list_from_json(doc["optional_inputs"], where + "/optional_inputs");
  }
  if (doc.contains("discovery_path")) {
    tool.discovery_path =
        node_list_from_json(doc["discovery_path"], where + "/discovery_path");
  }
  tool.description = require_string(doc, "description", where);
  return tool;
}

Json graph_body_json(const EnvGraph& graph) {
  Json databases = Json::object();
  for (const auto& db : graph.databases()) {
    Json attrs = Json::array();
    for (const auto& id : graph.nodes_of(db)) {
      attrs.push_back(node_to_json(*graph.find_node(id)));
    }
    databases[db] = Json{{"attributes", attrs}};
  }
  Json edges = Json::array();
  for (const auto& [key, edge] : graph.edges()) edges.push_back(edge_to_json(edge));
  Json tools = Json::array();
  for (const auto& [name, tool] : graph.tools()) tools.push_back(tool_to_json(tool));
  Json doc;
  doc["databases"] = databases;
  doc["edges"] = edges;
  doc["tools"] = tools;
  return doc;
}

Json graph_to_json(const EnvGraph& graph) {
  Json doc = graph_body_json(graph);
  doc["version_id"] = graph.version_id();
  doc["metadata"] = graph.metadata();
  return doc;
}

EnvGraph graph_from_json(const Json& doc) {
  if (!doc.is_object()) throw ParseError("/", "expected object");
  EnvGraph graph;
  graph.set_version_id(require_string(doc, "version_id", "/"));
  if (doc.contains("metadata")) {
    const Json& meta = doc["metadata"];
    if (!meta.is_object()) throw ParseError("/metadata", "expected object");
    for (auto it = meta.begin(); it != meta.end(); ++it) {
      if (!it.value().is_string()) throw ParseError("/metadata", "expected string values");
      graph.set_metadata(it.key(), it.value().get<std::string>());
    }
  }
  const Json& databases = require(doc, "databases", "/");
  if (!databases.is_object()) throw ParseError("/databases", "expected object");
  for (auto it = databases.begin(); it != databases.end(); ++it) {
    const Json& attrs = require(it.value(), "attributes", "databases/" + it.key());
    if (!attrs.is_array()) {
      throw ParseError("databases/" + it.key() + "/attributes", "expected array");
    }
    for (const auto& a : attrs) {
      AttributeNode node = node_from_json(a, it.key());
      if (graph.has_node(node.id)) {
        throw ParseError("databases/" + it.key(), "duplicate attribute " + node.id.str());
      }
      graph.add_node(std::move(node));
    }
  }
  const Json& edges = require(doc, "edges", "/");
  if (!edges.is_array()) throw ParseError("/edges", "expected array");
  for (const auto& e : edges) {
    RelationEdge edge = edge_from_json(e);
    if (graph.has_edge(edge.key())) {
      throw ParseError("/edges", "duplicate edge " + edge.key().str());
    }
    graph.add_edge(std::move(edge));
  }
  const Json& tools = require(doc, "tools", "/");
  if (!tools.is_array()) throw ParseError("/tools", "expected array");
  for (const auto& t : tools) {
    ToolSpec tool = tool_from_json(t);
    if (graph.has_tool(tool.name)) {
      throw ParseError("/tools", "duplicate tool " + tool.name);
    }
    graph.add_tool(std::move(tool));
  }
  return graph;
}

std::string canonical_text(const Json& doc) {
  return doc.dump(2) + "\n";
}

std::string graph_canonical_text(const EnvGraph& graph) {
  return canonical_text(graph_to_json(graph));
}

bool isomorphic(const EnvGraph& a, const EnvGraph& b) {
  return graph_body_json(a) == graph_body_json(b);
}

Json context_to_json(const EvolutionContext& context) {
  Json j;
  j["strategy"] = to_string(context.strategy);
  j["title"] = context.title;
  j["narrative"] = context.narrative;
  j["metadata"] = context.metadata;
  return j;
}

EvolutionContext context_from_json(const Json& doc) {
  EvolutionContext c;
  c.strategy = parse_strategy(require_string(doc, "strategy", "context"));
  c.title = require_string(doc, "title", "context");
  c.narrative = require_string(doc, "narrative", "context");
  c.metadata = doc.contains("metadata") ? doc["metadata"] : Json::object();
  return c;
}

namespace {

Json full_node_json(const AttributeNode& node) {
  Json j = node_to_json(node);
  j["database"] = node.id.database;
  return j;
}

AttributeNode full_node_from_json(const Json& doc) {
  return node_from_json(doc, require_string(doc, "database", "delta node"));
}

template <class T, class Fn>
Json list_json(const std::vector<T>& items, Fn fn) {
  Json arr = Json::array();
  for (const auto& item : items) arr.push_back(fn(item));
  return arr;
}

}  // namespace

Json delta_to_json(const GraphDelta& delta) {
  Json j;
  j["strategy"] = to_string(delta.strategy);
  j["added_nodes"] = list_json(delta.added_nodes, full_node_json);
  j["removed_nodes"] = list_json(delta.removed_nodes, full_node_json);
  j["added_edges"] = list_json(delta.added_edges, edge_to_json);
  j["removed_edges"] = list_json(delta.removed_edges, edge_to_json);
  j["added_tools"] = list_json(delta.added_tools, tool_to_json);
  j["removed_tools"] = list_json(delta.removed_tools, tool_to_json);
  j["context"] = context_to_json(delta.context);
  return j;
}

GraphDelta delta_from_json(const Json& doc) {
  GraphDelta d;
  d.strategy = parse_strategy(require_string(doc, "strategy", "delta"));
  for (const auto& n : require(doc, "added_nodes", "delta")) {
    d.added_nodes.push_back(full_node_from_json(n));
  }
  for (const auto& n : require(doc, "removed_nodes", "delta")) {
    d.removed_nodes.push_back(full_node_from_json(n));
  }
  for (const auto& e : require(doc, "added_edges", "delta")) {
    d.added_edges.push_back(edge_from_json(e));
  }
  for (const auto& e : require(doc, "removed_edges", "delta")) {
    d.removed_edges.push_back(edge_from_json(e));
  }
  for (const auto& t : require(doc, "added_tools", "delta")) {
    d.added_tools.push_back(tool_from_json(t));
  }
  for (const auto& t : require(doc, "removed_tools", "delta")) {
    d.removed_tools.push_back(tool_from_json(t));
  }
  d.context = context_from_json(require(doc, "context", "delta"));
  return d;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot open file");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ":" + std::to_string(e.byte), e.what());
  }
  return doc;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  write_text_file(path, canonical_text(doc));
}

EnvGraph read_graph_file(const std::filesystem::path& path) {
  return graph_from_json(read_json_file(path));
}

void write_graph_file(const std::filesystem::path& path, const EnvGraph& graph) {
  write_text_file(path, graph_canonical_text(graph));
}

}  // namespace evobench
