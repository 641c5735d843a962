#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// recompute results from first principles (plain BFS, nested-loop joins,
// brute force over edge removals) and never call the code paths they check.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "evobench/graph.hpp"
#include "evobench/rng.hpp"
#include "evobench/sandbox.hpp"

namespace evobench::testing {

inline AttributeNode make_node(const std::string& id, const std::string& type,
                               bool pk = false, bool fk = false) {
  AttributeNode n;
  n.id = NodeId::parse(id);
  n.value_type = ValueType::parse(type);
  n.description = "test attribute " + id;
  n.is_primary_key = pk;
  n.is_foreign_key = fk;
  return n;
}

inline RelationEdge make_edge(const std::string& src, const std::string& dst,
                              Relationship rel,
                              Cardinality card = Cardinality::OneToMany,
                              std::vector<std::string> tools = {}) {
  RelationEdge e;
  e.source = NodeId::parse(src);
  e.target = NodeId::parse(dst);
  e.relationship = rel;
  e.cardinality = card;
  e.tools = std::move(tools);
  return e;
}

inline ToolSpec make_tool(const std::string& name, ToolKind kind,
                          std::vector<std::string> inputs,
                          std::vector<std::string> outputs) {
  ToolSpec t;
  t.name = name;
  t.kind = kind;
  for (const auto& i : inputs) t.inputs.push_back(NodeId::parse(i));
  for (const auto& o : outputs) t.outputs.push_back(NodeId::parse(o));
  t.description = "test tool " + name;
  return t;
}

/// Two linked databases and one READ tool; enough to exercise validation,
/// deltas, and serialization without dragging in the seed environment.
inline EnvGraph tiny_graph() {
  EnvGraph g;
  g.set_version_id("G0");
  g.add_node(make_node("User.user_id", "str", true));
  g.add_node(make_node("User.name", "str"));
  g.add_node(make_node("Order.order_id", "str", true));
  g.add_node(make_node("Order.user_id", "str", false, true));
  g.add_node(make_node("Order.status", "str"));
  g.add_edge(make_edge("User.user_id", "User.name", Relationship::HasAttribute,
                       Cardinality::OneToOne));
  g.add_edge(make_edge("Order.order_id", "Order.status", Relationship::HasAttribute,
                       Cardinality::OneToOne));
  g.add_edge(make_edge("Order.user_id", "User.user_id", Relationship::References,
                       Cardinality::ManyToOne, {"get_user_orders"}));
  g.add_tool(make_tool("get_user_orders", ToolKind::Read, {"User.user_id"},
                       {"Order.order_id", "Order.status"}));
  return g;
}

// Undirected connectivity by plain BFS over the edge list. Isolated nodes
// count as their own components.
inline int oracle_components(const EnvGraph& g, const EdgeKey* skip = nullptr) {
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const auto& [key, e] : g.edges()) {
    if (skip && key == *skip) continue;
    adj[e.source].push_back(e.target);
    adj[e.target].push_back(e.source);
  }
  std::set<NodeId> seen;
  int components = 0;
  for (const auto& [id, node] : g.nodes()) {
    if (seen.count(id)) continue;
    ++components;
    std::vector<NodeId> frontier{id};
    seen.insert(id);
    while (!frontier.empty()) {
      NodeId cur = frontier.back();
      frontier.pop_back();
      for (const auto& nb : adj[cur]) {
        if (seen.insert(nb).second) frontier.push_back(nb);
      }
    }
  }
  return components;
}

inline bool oracle_connected(const EnvGraph& g) {
  return g.node_count() == 0 || oracle_components(g) == 1;
}

/// Remove-and-recount bridge detection; quadratic and proud of it.
inline std::vector<EdgeKey> oracle_bridges(const EnvGraph& g) {
  int base = oracle_components(g);
  std::vector<EdgeKey> out;
  for (const auto& [key, e] : g.edges()) {
    if (oracle_components(g, &key) > base) out.push_back(key);
  }
  return out;
}

/// Fixed point of one-hop expansion: directed edges, plus tools whose
/// non-optional inputs are all active.
inline std::set<NodeId> oracle_closure(const EnvGraph& g, std::set<NodeId> active) {
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& [key, e] : g.edges()) {
      if (active.count(e.source) && !active.count(e.target)) {
        active.insert(e.target);
        grew = true;
      }
    }
    for (const auto& [name, tool] : g.tools()) {
      bool ready = true;
      for (const auto& in : tool.inputs) {
        if (!tool.is_optional_input(in) && !active.count(in)) {
          ready = false;
          break;
        }
      }
      if (!ready) continue;
      for (const auto& out : tool.outputs) {
        if (active.insert(out).second) grew = true;
      }
    }
  }
  return active;
}

inline bool join_predicate(Relationship r) {
  return r == Relationship::References || r == Relationship::Contains ||
         r == Relationship::BelongsTo;
}

/// Scalar equality, or membership when the stored side is a list.
inline bool contains_value(const Json& stored, const Json& wanted) {
  if (stored.is_array() && !wanted.is_array()) {
    for (const auto& el : stored) {
      if (el == wanted) return true;
    }
    return false;
  }
  return stored == wanted;
}

/// The joinable edge for one discovery hop: an exact predicate edge between
/// the two nodes (either orientation, lowest key), else the lowest-key
/// predicate edge between their databases.
inline const RelationEdge* hop_join_edge(const EnvGraph& g, const NodeId& u,
                                         const NodeId& v) {
  for (const auto& [key, e] : g.edges()) {
    bool exact = (e.source == u && e.target == v) || (e.source == v && e.target == u);
    if (exact && join_predicate(e.relationship)) return &e;
  }
  for (const auto& [key, e] : g.edges()) {
    if (!join_predicate(e.relationship)) continue;
    const std::string& s = e.source.database;
    const std::string& t = e.target.database;
    if ((s == u.database && t == v.database) || (s == v.database && t == u.database))
      return &e;
  }
  return nullptr;
}

/// What a composed hop-by-hop read produces: projected records (as canonical
/// dumps) and one fact per non-null projected cell.
struct ComposedRead {
  bool found = false;
  std::set<std::string> records;
  std::set<Fact> facts;
};

inline ComposedRead compose_read(const SandboxState& st, const ToolSpec& tool,
                                 const std::map<NodeId, Json>& args) {
  ComposedRead out;
  const auto& path = tool.discovery_path;
  if (path.empty()) return out;

  auto rows_of = [&](const std::string& db) {
    std::vector<const EntityInstance*> rows;
    auto it = st.store.find(db);
    if (it != st.store.end()) {
      for (const auto& e : it->second) rows.push_back(&e);
    }
    return rows;
  };
  auto filter_args = [&](const std::string& db,
                         std::vector<const EntityInstance*> rows) {
    std::vector<const EntityInstance*> keep;
    for (const auto* e : rows) {
      bool ok = true;
      for (const auto& [node, wanted] : args) {
        if (node.database != db) continue;
        const Json* v = e->find(node.attribute);
        if (!v || !contains_value(*v, wanted)) {
          ok = false;
          break;
        }
      }
      if (ok) keep.push_back(e);
    }
    return keep;
  };

  std::map<std::string, std::vector<const EntityInstance*>> visited;
  const std::string& front = path.front().database;
  auto rows = filter_args(front, rows_of(front));
  if (rows.empty()) return out;
  visited[front] = std::move(rows);

  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const NodeId& u = path[i];
    const NodeId& v = path[i + 1];
    if (u.database == v.database) continue;
    const RelationEdge* e = hop_join_edge(st.graph, u, v);
    if (!e) return out;
    bool forward = e->source.database == u.database;
    const std::string& from_attr = forward ? e->source.attribute : e->target.attribute;
    const std::string& to_attr = forward ? e->target.attribute : e->source.attribute;
    std::vector<const EntityInstance*> next;
    for (const auto* cand : rows_of(v.database)) {
      const Json* tv = cand->find(to_attr);
      if (!tv || tv->is_null()) continue;
      bool linked = false;
      for (const auto* from : visited[u.database]) {
        const Json* fv = from->find(from_attr);
        if (!fv || fv->is_null()) continue;
        if (contains_value(*fv, *tv) || contains_value(*tv, *fv)) {
          linked = true;
          break;
        }
      }
      if (linked) next.push_back(cand);
    }
    next = filter_args(v.database, std::move(next));
    if (next.empty()) return out;
    visited[v.database] = std::move(next);
  }

  std::set<std::string> out_dbs;
  for (const auto& n : tool.outputs) out_dbs.insert(n.database);
  for (const auto& db : out_dbs) {
    auto it = visited.find(db);
    if (it == visited.end()) return out;
    auto pk = st.graph.primary_key(db);
    for (const auto* e : it->second) {
      Json key;
      if (pk) {
        const Json* k = e->find(pk->attribute);
        if (k) key = *k;
      }
      Json values = Json::object();
      for (const auto& o : tool.outputs) {
        if (o.database != db) continue;
        const Json* v = e->find(o.attribute);
        values[o.attribute] = v ? *v : Json();
        if (v && !v->is_null()) out.facts.insert(Fact{o, key, *v});
      }
      out.records.insert(
          Json{{"database", db}, {"entity_key", key}, {"values", values}}.dump());
    }
  }
  out.found = true;
  return out;
}

inline std::set<std::string> record_set(const std::vector<ToolRecord>& records) {
  std::set<std::string> out;
  for (const auto& r : records) {
    Json values = Json::object();
    for (const auto& [k, v] : r.values) values[k] = v;
    out.insert(Json{{"database", r.database},
                    {"entity_key", r.entity_key},
                    {"values", values}}
                   .dump());
  }
  return out;
}

/// Bind every required input to the first non-null stored value of its
/// attribute; the way the criterion checks call tools "as the data lies".
inline std::map<NodeId, Json> args_from_store(const SandboxState& st,
                                              const ToolSpec& tool) {
  std::map<NodeId, Json> args;
  for (const auto& n : tool.inputs) {
    if (tool.is_optional_input(n)) continue;
    auto it = st.store.find(n.database);
    if (it == st.store.end()) continue;
    for (const auto& e : it->second) {
      const Json* v = e.find(n.attribute);
      if (v && !v->is_null()) {
        args[n] = *v;
        break;
      }
    }
  }
  return args;
}

/// Materialized store with `per_db` synthesized entities in every database.
inline SandboxState full_store(const EnvGraph& g, Rng& rng, int per_db = 2) {
  std::vector<EntitySpec> specs;
  for (const auto& db : g.databases()) {
    for (int i = 0; i < per_db; ++i) specs.push_back(EntitySpec{db, {}});
  }
  return materialize(g, specs, rng);
}

}  // namespace evobench::testing
