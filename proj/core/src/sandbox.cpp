#include "evobench/sandbox.hpp"

#include <algorithm>
#include <cstdio>

#include "evobench/errors.hpp"
#include "evobench/graph_io.hpp"

namespace evobench {

std::string to_string(ToolErrorKind k) {
  switch (k) {
    case ToolErrorKind::None: return "none";
    case ToolErrorKind::UnknownTool: return "unknown_tool";
    case ToolErrorKind::DeprecatedTool: return "deprecated_tool";
    case ToolErrorKind::MissingInput: return "missing_input";
    case ToolErrorKind::NotFound: return "not_found";
  }
  return "none";
}

const EntityInstance* SandboxState::find_entity(const std::string& database,
                                                const Json& pk_value) const {
  auto pk = graph.primary_key(database);
  if (!pk) return nullptr;
  auto it = store.find(database);
  if (it == store.end()) return nullptr;
  for (const auto& e : it->second) {
    const Json* v = e.find(pk->attribute);
    if (v && *v == pk_value) return &e;
  }
  return nullptr;
}

EntityInstance* SandboxState::find_entity(const std::string& database,
                                          const Json& pk_value) {
  return const_cast<EntityInstance*>(
      static_cast<const SandboxState*>(this)->find_entity(database, pk_value));
}

namespace {

bool is_join_predicate(Relationship r) {
  return r == Relationship::References || r == Relationship::Contains ||
         r == Relationship::BelongsTo;
}

bool conforms(const ValueType& type, const Json& v) {
  if (v.is_null()) return type.nullable;
  switch (type.kind) {
    case ValueKind::String: return v.is_string();
    case ValueKind::Integer: return v.is_number_integer();
    case ValueKind::Float: return v.is_number();
    case ValueKind::Boolean: return v.is_boolean();
    case ValueKind::StringList: {
      if (!v.is_array()) return false;
      for (const auto& el : v) {
        if (!el.is_string()) return false;
      }
      return true;
    }
    case ValueKind::Object: return v.is_object();
  }
  return false;
}

/// Scalar equality, or membership when the stored value is a list.
bool value_contains(const Json& stored, const Json& wanted) {
  if (stored.is_array() && !wanted.is_array()) {
    for (const auto& el : stored) {
      if (el == wanted) return true;
    }
    return false;
  }
  return stored == wanted;
}

std::string pad3(int n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", n);
  return buf;
}

std::string synth_pk(const SandboxState& st, const std::string& db) {
  std::string prefix = snake_case(db) + "_";
  auto it = st.store.find(db);
  int n = static_cast<int>(it == st.store.end() ? 0 : it->second.size()) + 1;
  std::string candidate = prefix + pad3(n);
  while (st.find_entity(db, Json(candidate))) {
    candidate = prefix + pad3(++n);
  }
  return candidate;
}

/// The map of a database's schema attributes in the sandbox graph.
std::map<std::string, const AttributeNode*> schema_of(const EnvGraph& g,
                                                      const std::string& db) {
  std::map<std::string, const AttributeNode*> out;
  for (const auto& id : g.nodes_of(db)) out[id.attribute] = g.find_node(id);
  return out;
}

}  // namespace

const AttributeNode* fk_target(const EnvGraph& g, const NodeId& node) {
  const RelationEdge* best = nullptr;
  for (const auto* e : g.out_edges(node)) {
    if (!is_join_predicate(e->relationship)) continue;
    const auto* t = g.find_node(e->target);
    if (!t || !t->is_primary_key) continue;
    if (!best || e->key() < best->key()) best = e;
  }
  return best ? g.find_node(best->target) : nullptr;
}

namespace {

/// One store-consistency sweep: dangling FK values get stub entities,
/// parent list attributes collect children that point back at them, and
/// null scalar FKs get back-filled from reciprocal links. Returns whether
/// anything changed.
bool consistency_pass(SandboxState& st) {
  bool changed = false;
  const EnvGraph& g = st.graph;

  std::vector<std::string> dbs;
  for (const auto& [db, entities] : st.store) dbs.push_back(db);

  for (const auto& db : dbs) {
    auto schema = schema_of(g, db);
    for (std::size_t i = 0; i < st.store[db].size(); ++i) {
      for (const auto& [attr, node] : schema) {
        if (!node->is_foreign_key) continue;
        const AttributeNode* target = fk_target(g, node->id);
        if (!target) continue;
        const Json* v = st.store[db][i].find(attr);
        if (!v || v->is_null()) continue;
        if (node->value_type.kind == ValueKind::StringList) {
          for (const auto& el : *v) {
            if (!st.find_entity(target->id.database, el)) {
              EntityInstance stub;
              stub.database = target->id.database;
              stub.values[target->id.attribute] = el;
              st.store[target->id.database].push_back(std::move(stub));
              changed = true;
            }
          }
        } else if (!st.find_entity(target->id.database, *v)) {
          EntityInstance stub;
          stub.database = target->id.database;
          stub.values[target->id.attribute] = *v;
          st.store[target->id.database].push_back(std::move(stub));
          changed = true;
        }
      }
    }
  }

  // Parent lists: a list attribute A.la referencing B's primary key gathers
  // every B entity whose own FK points back at the A entity.
  for (const auto& [key, edge] : g.edges()) {
    if (!is_join_predicate(edge.relationship)) continue;
    const auto* la = g.find_node(edge.source);
    const auto* bpk = g.find_node(edge.target);
    if (!la || !bpk || la->value_type.kind != ValueKind::StringList) continue;
    if (!bpk->is_primary_key) continue;
    auto apk = g.primary_key(la->id.database);
    if (!apk) continue;
    const AttributeNode* apk_node = g.find_node(*apk);

    // Find B's FK attribute that references A's primary key.
    std::string back_attr;
    for (const auto& id : g.nodes_of(bpk->id.database)) {
      const auto* n = g.find_node(id);
      if (!n->is_foreign_key) continue;
      const AttributeNode* t = fk_target(g, id);
      if (t && t->id == apk_node->id) {
        back_attr = id.attribute;
        break;
      }
    }
    if (back_attr.empty()) continue;

    auto a_it = st.store.find(la->id.database);
    auto b_it = st.store.find(bpk->id.database);
    if (a_it == st.store.end() || b_it == st.store.end()) continue;
    for (auto& a : a_it->second) {
      const Json* a_key = a.find(apk->attribute);
      if (!a_key) continue;
      for (const auto& b : b_it->second) {
        const Json* back = b.find(back_attr);
        const Json* b_key = b.find(bpk->id.attribute);
        if (!back || !b_key || !value_contains(*back, *a_key)) continue;
        Json& list = a.values[la->id.attribute];
        if (!list.is_array()) list = Json::array();
        if (!value_contains(list, *b_key)) {
          list.push_back(*b_key);
          changed = true;
        }
      }
    }
  }

  // Reciprocal scalar links: B.g points at A, A.f (scalar FK into B) is
  // still null, so A.f learns B's key.
  for (const auto& db : dbs) {
    auto schema = schema_of(g, db);
    for (const auto& [attr, node] : schema) {
      if (!node->is_foreign_key || node->value_type.kind != ValueKind::String) {
        continue;
      }
      const AttributeNode* target = fk_target(g, node->id);
      if (!target) continue;
      auto apk = g.primary_key(db);
      if (!apk) continue;
      std::string back_attr;
      for (const auto& id : g.nodes_of(target->id.database)) {
        const AttributeNode* t = fk_target(g, id);
        if (t && t->id == *apk) {
          back_attr = id.attribute;
          break;
        }
      }
      if (back_attr.empty()) continue;
      auto b_it = st.store.find(target->id.database);
      if (b_it == st.store.end()) continue;
      for (auto& a : st.store[db]) {
        const Json* cur = a.find(attr);
        if (cur && !cur->is_null()) continue;
        const Json* a_key = a.find(apk->attribute);
        if (!a_key) continue;
        for (const auto& b : b_it->second) {
          const Json* back = b.find(back_attr);
          const Json* b_key = b.find(target->id.attribute);
          if (back && b_key && value_contains(*back, *a_key)) {
            a.values[attr] = *b_key;
            changed = true;
            break;
          }
        }
      }
    }
  }
  return changed;
}

/// Deterministic value for an attribute nobody stated. Seeded when an rng is
/// supplied (materialization); flat defaults otherwise (WRITE tools carry no
/// randomness).
Json synth_value(const AttributeNode& node, int ordinal, Rng* rng) {
  if (!node.allowed_values.empty()) {
    return rng ? rng->pick(node.allowed_values) : node.allowed_values.front();
  }
  if (node.value_type.nullable) return Json();
  switch (node.value_type.kind) {
    case ValueKind::String: return node.id.attribute + "_" + pad3(ordinal);
    case ValueKind::Integer: return rng ? Json(rng->range(1, 50)) : Json(1);
    case ValueKind::Float:
      return rng ? Json(rng->range(100, 49999) / 100.0) : Json(0.0);
    case ValueKind::Boolean: return rng ? Json(rng->chance(0.5)) : Json(false);
    case ValueKind::StringList: return Json::array();
    case ValueKind::Object: return Json::object();
  }
  return Json();
}

/// Completes missing attributes. Foreign keys never take invented values:
/// they point at an existing target entity (smallest key), at a stub created
/// here when the target database is empty, or at the entity itself for
/// self-references. Returns whether anything was written.
bool fill_entity(SandboxState& st, EntityInstance& e, int ordinal, Rng* rng) {
  const EnvGraph& g = st.graph;
  bool changed = false;
  for (const auto& id : g.nodes_of(e.database)) {
    if (e.values.count(id.attribute)) continue;
    const AttributeNode* node = g.find_node(id);
    if (node->is_primary_key) continue;  // callers set primary keys first
    const AttributeNode* target =
        node->is_foreign_key ? fk_target(g, id) : nullptr;
    if (target) {
      if (node->value_type.kind == ValueKind::StringList) {
        e.values[id.attribute] = Json::array();
      } else if (node->value_type.nullable) {
        e.values[id.attribute] = Json();
      } else if (target->id.database == e.database) {
        e.values[id.attribute] = e.values[target->id.attribute];
      } else {
        auto& pool = st.store[target->id.database];
        if (pool.empty()) {
          EntityInstance stub;
          stub.database = target->id.database;
          stub.values[target->id.attribute] = synth_pk(st, target->id.database);
          pool.push_back(std::move(stub));
        }
        const Json* best = nullptr;
        for (const auto& other : pool) {
          const Json* key = other.find(target->id.attribute);
          if (key && (!best || key->dump() < best->dump())) best = key;
        }
        e.values[id.attribute] = best ? *best : Json();
      }
      changed = true;
      continue;
    }
    e.values[id.attribute] = synth_value(*node, ordinal, rng);
    changed = true;
  }
  return changed;
}

}  // namespace

SandboxState materialize(const EnvGraph& graph,
                         const std::vector<EntitySpec>& prerequisites, Rng& rng) {
  SandboxState st;
  st.graph = graph;
  auto dbs = graph.databases();

  for (const auto& spec : prerequisites) {
    if (!dbs.count(spec.database)) {
      throw SchemaMismatchError("unknown database: " + spec.database);
    }
    auto schema = schema_of(graph, spec.database);
    EntityInstance e;
    e.database = spec.database;
    for (const auto& [attr, value] : spec.values) {
      auto it = schema.find(attr);
      if (it == schema.end()) {
        throw SchemaMismatchError("unknown attribute: " + spec.database + "." + attr);
      }
      if (!conforms(it->second->value_type, value)) {
        throw SchemaMismatchError("value for " + spec.database + "." + attr +
                                  " does not fit " + it->second->value_type.str());
      }
      e.values[attr] = value;
    }
    auto pk = graph.primary_key(spec.database);
    if (!pk) {
      throw SchemaMismatchError("database has no primary key: " + spec.database);
    }
    auto pk_it = e.values.find(pk->attribute);
    if (pk_it == e.values.end() || pk_it->second.is_null()) {
      e.values[pk->attribute] = synth_pk(st, spec.database);
    } else if (st.find_entity(spec.database, pk_it->second)) {
      throw SchemaMismatchError("duplicate primary key in prerequisites: " +
                                pk_it->second.dump());
    }
    st.store[spec.database].push_back(std::move(e));
  }

  // Alternate link settlement and fill until quiescent: consistency passes
  // may stub out referenced entities, and those stubs need filling too.
  for (int round = 0; round < 8; ++round) {
    bool changed = false;
    for (int pass = 0; pass < 8 && consistency_pass(st); ++pass) changed = true;
    for (auto& [db, entities] : st.store) {
      for (std::size_t i = 0; i < entities.size(); ++i) {
        changed |= fill_entity(st, entities[i], static_cast<int>(i) + 1, &rng);
      }
    }
    if (!changed) break;
  }

  auto problems = store_problems(st);
  if (!problems.empty()) {
    throw SchemaMismatchError("materialized store is not conformant: " +
                              problems.front());
  }
  return st;
}

std::vector<std::string> store_problems(const SandboxState& state) {
  std::vector<std::string> out;
  const EnvGraph& g = state.graph;
  for (const auto& [db, entities] : state.store) {
    if (entities.empty()) continue;
    auto schema = schema_of(g, db);
    auto pk = g.primary_key(db);
    if (!pk) {
      out.push_back("database " + db + " has no primary key node");
      continue;
    }
    std::set<std::string> seen;
    for (const auto& e : entities) {
      const Json* key = e.find(pk->attribute);
      if (!key || key->is_null()) {
        out.push_back(db + " entity is missing its primary key");
        continue;
      }
      if (!seen.insert(key->dump()).second) {
        out.push_back(db + " primary key duplicated: " + key->dump());
      }
      for (const auto& [attr, node] : schema) {
        const Json* v = e.find(attr);
        if (!v) {
          out.push_back(db + "." + attr + " missing on " + key->dump());
          continue;
        }
        if (!conforms(node->value_type, *v)) {
          out.push_back(db + "." + attr + " ill-typed on " + key->dump() + ": " +
                        v->dump());
          continue;
        }
        if (!node->is_foreign_key) continue;
        const AttributeNode* target = fk_target(g, node->id);
        if (!target) continue;
        auto resolves = [&](const Json& el) {
          return state.find_entity(target->id.database, el) != nullptr;
        };
        if (v->is_array()) {
          for (const auto& el : *v) {
            if (!resolves(el)) {
              out.push_back(db + "." + attr + " dangles: " + el.dump());
            }
          }
        } else if (!v->is_null() && !resolves(*v)) {
          out.push_back(db + "." + attr + " dangles: " + v->dump());
        }
      }
      for (const auto& [attr, v] : e.values) {
        if (!schema.count(attr)) {
          out.push_back(db + " carries unknown attribute " + attr);
        }
      }
    }
  }
  return out;
}

namespace {

using Rows = std::vector<std::size_t>;

Rows all_rows(const SandboxState& st, const std::string& db) {
  Rows out;
  auto it = st.store.find(db);
  if (it != st.store.end()) {
    out.resize(it->second.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
  }
  return out;
}

Rows filter_by_args(const SandboxState& st, const std::string& db, Rows rows,
                    const std::map<NodeId, Json>& args) {
  auto it = st.store.find(db);
  if (it == st.store.end()) return {};
  Rows out;
  for (auto i : rows) {
    const EntityInstance& e = it->second[i];
    bool keep = true;
    for (const auto& [node, wanted] : args) {
      if (node.database != db) continue;
      const Json* v = e.find(node.attribute);
      if (!v || !value_contains(*v, wanted)) {
        keep = false;
        break;
      }
    }
    if (keep) out.push_back(i);
  }
  return out;
}

/// The predicate edge joining two databases; lowest edge key wins ties.
const RelationEdge* join_edge(const EnvGraph& g, const std::string& a,
                              const std::string& b) {
  const RelationEdge* best = nullptr;
  for (const auto& [key, edge] : g.edges()) {
    if (!is_join_predicate(edge.relationship)) continue;
    const std::string& s = edge.source.database;
    const std::string& t = edge.target.database;
    if (!((s == a && t == b) || (s == b && t == a))) continue;
    if (!best || key < best->key()) best = &edge;
  }
  return best;
}

/// Join rows of `from_db` onto `to_db` along `edge`, whichever way the edge
/// is oriented. A row of `to_db` survives when some surviving `from_db` row
/// links to it.
Rows join_across(const SandboxState& st, const std::string& from_db,
                 const Rows& from_rows, const std::string& to_db,
                 const RelationEdge& edge) {
  const auto& from_store = st.store.at(from_db);
  Rows candidates = all_rows(st, to_db);
  Rows out;
  bool forward = edge.source.database == from_db;
  const std::string& from_attr = forward ? edge.source.attribute : edge.target.attribute;
  const std::string& to_attr = forward ? edge.target.attribute : edge.source.attribute;
  for (auto j : candidates) {
    const EntityInstance& to_e = st.store.at(to_db)[j];
    const Json* tv = to_e.find(to_attr);
    if (!tv || tv->is_null()) continue;
    for (auto i : from_rows) {
      const Json* fv = from_store[i].find(from_attr);
      if (!fv || fv->is_null()) continue;
      // Either side may be the list-valued one.
      if (value_contains(*fv, *tv) || value_contains(*tv, *fv)) {
        out.push_back(j);
        break;
      }
    }
  }
  return out;
}

/// The exact predicate edge for a discovery hop, when the hop itself is one.
const RelationEdge* hop_edge(const EnvGraph& g, const NodeId& u, const NodeId& v) {
  const RelationEdge* best = nullptr;
  for (const auto* e : g.out_edges(u)) {
    if (e->target == v && is_join_predicate(e->relationship)) {
      if (!best || e->key() < best->key()) best = e;
    }
  }
  for (const auto* e : g.out_edges(v)) {
    if (e->target == u && is_join_predicate(e->relationship)) {
      if (!best || e->key() < best->key()) best = e;
    }
  }
  return best;
}

ToolResult fail(ToolErrorKind kind, std::string message,
                std::string workaround = {}) {
  ToolResult r;
  r.ok = false;
  r.error = kind;
  r.message = std::move(message);
  r.workaround_hint = std::move(workaround);
  return r;
}

void project_rows(const SandboxState& st, const std::string& db,
                  const Rows& rows, const std::set<NodeId>& outputs,
                  std::vector<ToolRecord>& records) {
  auto pk = st.graph.primary_key(db);
  auto it = st.store.find(db);
  if (it == st.store.end()) return;
  for (auto i : rows) {
    const EntityInstance& e = it->second[i];
    ToolRecord rec;
    rec.database = db;
    if (pk) {
      const Json* key = e.find(pk->attribute);
      rec.entity_key = key ? *key : Json();
    }
    for (const auto& out : outputs) {
      if (out.database != db) continue;
      const Json* v = e.find(out.attribute);
      rec.values[out.attribute] = v ? *v : Json();
    }
    records.push_back(std::move(rec));
  }
}

void finish_ok(ToolResult& r) {
  std::sort(r.records.begin(), r.records.end(),
            [](const ToolRecord& a, const ToolRecord& b) {
              if (a.database != b.database) return a.database < b.database;
              return a.entity_key.dump() < b.entity_key.dump();
            });
  r.facts = extract_facts(r.records);
}

ToolResult run_read(const SandboxState& st, const ToolSpec& tool,
                    const ToolCall& call) {
  const EnvGraph& g = st.graph;
  std::map<std::string, Rows> visited;
  std::vector<std::string> order;

  auto visit = [&](const std::string& db, Rows rows) {
    if (!visited.count(db)) order.push_back(db);
    visited[db] = std::move(rows);
  };

  if (!tool.discovery_path.empty()) {
    const std::string& front_db = tool.discovery_path.front().database;
    Rows rows = filter_by_args(st, front_db, all_rows(st, front_db), call.args);
    if (rows.empty()) return fail(ToolErrorKind::NotFound, "no matching " + front_db + " records");
    visit(front_db, rows);
    for (std::size_t i = 0; i + 1 < tool.discovery_path.size(); ++i) {
      const NodeId& u = tool.discovery_path[i];
      const NodeId& v = tool.discovery_path[i + 1];
      if (u.database == v.database) continue;
      const RelationEdge* edge = hop_edge(g, u, v);
      if (!edge) edge = join_edge(g, u.database, v.database);
      if (!edge) {
        return fail(ToolErrorKind::NotFound,
                    "no join between " + u.database + " and " + v.database);
      }
      Rows next = join_across(st, u.database, visited.at(u.database), v.database, *edge);
      next = filter_by_args(st, v.database, std::move(next), call.args);
      if (next.empty()) {
        return fail(ToolErrorKind::NotFound, "no matching " + v.database + " records");
      }
      visit(v.database, std::move(next));
    }
  } else {
    std::set<std::string> needed;
    for (const auto& n : tool.inputs) needed.insert(n.database);
    for (const auto& n : tool.outputs) needed.insert(n.database);
    const std::string& start = tool.inputs.front().database;
    Rows rows = filter_by_args(st, start, all_rows(st, start), call.args);
    if (rows.empty()) return fail(ToolErrorKind::NotFound, "no matching " + start + " records");
    visit(start, rows);

    // Database adjacency over join predicates.
    std::map<std::string, std::set<std::string>> adjacent;
    for (const auto& [key, edge] : g.edges()) {
      if (!is_join_predicate(edge.relationship)) continue;
      if (edge.source.database == edge.target.database) continue;
      adjacent[edge.source.database].insert(edge.target.database);
      adjacent[edge.target.database].insert(edge.source.database);
    }

    auto unvisited_needed = [&]() {
      std::vector<std::string> out;
      for (const auto& db : needed) {
        if (!visited.count(db)) out.push_back(db);
      }
      return out;
    };

    while (!unvisited_needed().empty()) {
      // BFS from the visited frontier; among nearest needed databases the
      // lexicographically smallest wins.
      std::map<std::string, std::string> parent;
      std::vector<std::string> frontier = order;
      std::set<std::string> seen(order.begin(), order.end());
      std::string found;
      while (!frontier.empty() && found.empty()) {
        std::sort(frontier.begin(), frontier.end());
        std::vector<std::string> next_frontier;
        for (const auto& db : frontier) {
          if (!visited.count(db) && needed.count(db) && found.empty()) {
            found = db;
            break;
          }
        }
        if (!found.empty()) break;
        for (const auto& db : frontier) {
          auto adj = adjacent.find(db);
          if (adj == adjacent.end()) continue;
          for (const auto& nb : adj->second) {
            if (seen.insert(nb).second) {
              parent[nb] = db;
              next_frontier.push_back(nb);
            }
          }
        }
        frontier = std::move(next_frontier);
      }
      if (found.empty()) {
        return fail(ToolErrorKind::NotFound,
                    "no join path to " + unvisited_needed().front());
      }
      std::vector<std::string> path{found};
      while (parent.count(path.back())) path.push_back(parent.at(path.back()));
      std::reverse(path.begin(), path.end());
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const RelationEdge* edge = join_edge(g, path[i], path[i + 1]);
        if (!edge) {
          return fail(ToolErrorKind::NotFound,
                      "no join between " + path[i] + " and " + path[i + 1]);
        }
        Rows next = join_across(st, path[i], visited.at(path[i]), path[i + 1], *edge);
        next = filter_by_args(st, path[i + 1], std::move(next), call.args);
        if (next.empty()) {
          return fail(ToolErrorKind::NotFound,
                      "no matching " + path[i + 1] + " records");
        }
        visit(path[i + 1], std::move(next));
      }
    }
  }

  ToolResult r;
  std::set<NodeId> outputs(tool.outputs.begin(), tool.outputs.end());
  std::set<std::string> out_dbs;
  for (const auto& n : tool.outputs) out_dbs.insert(n.database);
  for (const auto& db : out_dbs) {
    auto it = visited.find(db);
    if (it == visited.end()) {
      return fail(ToolErrorKind::NotFound, "no route to " + db);
    }
    project_rows(st, db, it->second, outputs, r.records);
  }
  finish_ok(r);
  return r;
}

enum class WriteMode { Create, Upsert, Remove, Clear };

WriteMode write_mode(const std::string& tool_name) {
  auto cut = tool_name.find('_');
  std::string verb = tool_name.substr(0, cut);
  static const std::set<std::string> creators{
      "add",  "create", "initiate", "open",  "book", "issue",
      "enroll", "send",   "register", "start", "place"};
  if (verb == "clear") return WriteMode::Clear;
  if (verb == "remove" || verb == "delete") return WriteMode::Remove;
  if (creators.count(verb)) return WriteMode::Create;
  return WriteMode::Upsert;
}

std::vector<std::string> verb_tokens(const std::string& tool_name) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : tool_name) {
    if (c == '_') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

/// The allowed value a status flip should land on for this tool, e.g.
/// cancel_* moves an enum to "cancelled". Falls back to the last allowed
/// value, which seed schemas keep as the terminal state.
Json flip_target(const std::string& tool_name, const std::vector<Json>& allowed) {
  for (const auto& token : verb_tokens(tool_name)) {
    std::string stem = token.size() > 3 ? token.substr(0, token.size() - 1) : token;
    for (const auto& v : allowed) {
      if (!v.is_string()) continue;
      std::string s = v.get<std::string>();
      if (s.rfind(token, 0) == 0 || s.rfind(stem, 0) == 0) return v;
    }
  }
  return allowed.back();
}

struct ArgSplit {
  // Primary-key args resolve to existing entities (selectors).
  std::map<std::string, Json> selectors;  // db -> key value
  // Everything else is payload, grouped by database.
  std::map<std::string, std::map<std::string, Json>> payload;
};

ArgSplit split_args(const EnvGraph& g, const ToolCall& call) {
  ArgSplit out;
  for (const auto& [node, value] : call.args) {
    const AttributeNode* n = g.find_node(node);
    if (n && n->is_primary_key) {
      out.selectors[node.database] = value;
    } else {
      out.payload[node.database][node.attribute] = value;
    }
  }
  return out;
}

std::optional<std::string> set_checked(const EnvGraph& g, EntityInstance& e,
                                       const std::string& attr, const Json& v) {
  const AttributeNode* node = g.find_node(NodeId{e.database, attr});
  if (!node) return "unknown attribute " + e.database + "." + attr;
  if (!conforms(node->value_type, v)) {
    return e.database + "." + attr + " expects " + node->value_type.str();
  }
  if (!node->allowed_values.empty() && v.is_string()) {
    bool hit = false;
    for (const auto& a : node->allowed_values) {
      if (v == Json(a)) {
        hit = true;
        break;
      }
    }
    if (!hit) return v.dump() + " is not an allowed value for " + e.database + "." + attr;
  }
  e.values[attr] = v;
  return std::nullopt;
}

/// Narrow parent rows to those joined with each selector entity.
Rows narrow_by_selectors(const SandboxState& st, const std::string& parent_db,
                         Rows rows,
                         const std::map<std::string, const EntityInstance*>& selected) {
  for (const auto& [db, entity] : selected) {
    if (db == parent_db) {
      auto pk = st.graph.primary_key(db);
      const Json* key = pk ? entity->find(pk->attribute) : nullptr;
      Rows out;
      for (auto i : rows) {
        const Json* v = pk ? st.store.at(db)[i].find(pk->attribute) : nullptr;
        if (v && key && *v == *key) out.push_back(i);
      }
      rows = std::move(out);
      continue;
    }
    const RelationEdge* edge = join_edge(st.graph, db, parent_db);
    if (!edge) continue;
    auto pk = st.graph.primary_key(db);
    Rows from;
    if (pk) {
      const auto& sv = st.store.at(db);
      for (std::size_t i = 0; i < sv.size(); ++i) {
        if (&sv[i] == entity) from.push_back(i);
      }
    }
    rows = join_across(st, db, from, parent_db, *edge);
  }
  return rows;
}

/// The list attribute on `parent_db` whose contains/references edge targets
/// `child_db`'s primary key.
const AttributeNode* owning_list(const EnvGraph& g, const std::string& parent_db,
                                 const std::string& child_db) {
  auto child_pk = g.primary_key(child_db);
  if (!child_pk) return nullptr;
  for (const auto& id : g.nodes_of(parent_db)) {
    const AttributeNode* n = g.find_node(id);
    if (n->value_type.kind != ValueKind::StringList) continue;
    for (const auto* e : g.out_edges(id)) {
      if (e->target == *child_pk && is_join_predicate(e->relationship)) return n;
    }
  }
  return nullptr;
}

ToolResult run_write(SandboxState& st, const ToolSpec& tool, const ToolCall& call) {
  EnvGraph& g = st.graph;
  ArgSplit args = split_args(g, call);
  std::set<NodeId> outputs(tool.outputs.begin(), tool.outputs.end());
  std::set<std::string> out_dbs;
  for (const auto& n : tool.outputs) out_dbs.insert(n.database);

  // Selector args must name real entities.
  std::map<std::string, const EntityInstance*> selected;
  for (const auto& [db, key] : args.selectors) {
    const EntityInstance* e = st.find_entity(db, key);
    if (!e) {
      return fail(ToolErrorKind::NotFound, "no " + db + " with key " + key.dump());
    }
    selected[db] = e;
  }

  WriteMode mode = write_mode(tool.name);
  ToolResult r;

  auto echo_entity = [&](const EntityInstance& e) {
    ToolRecord rec;
    rec.database = e.database;
    auto pk = g.primary_key(e.database);
    if (pk) {
      const Json* key = e.find(pk->attribute);
      rec.entity_key = key ? *key : Json();
    }
    bool any = false;
    for (const auto& out : outputs) {
      if (out.database != e.database) continue;
      const Json* v = e.find(out.attribute);
      rec.values[out.attribute] = v ? *v : Json();
      any = true;
    }
    if (any) r.records.push_back(std::move(rec));
  };

  if (mode == WriteMode::Clear) {
    for (const auto& parent_db : out_dbs) {
      const AttributeNode* list = nullptr;
      for (const auto& out : outputs) {
        if (out.database != parent_db) continue;
        const AttributeNode* n = g.find_node(out);
        if (n && n->value_type.kind == ValueKind::StringList) list = n;
      }
      if (!list) continue;
      Rows rows = narrow_by_selectors(st, parent_db, all_rows(st, parent_db), selected);
      if (rows.empty()) {
        return fail(ToolErrorKind::NotFound, "no " + parent_db + " to clear");
      }
      for (auto i : rows) {
        st.store[parent_db][i].values[list->id.attribute] = Json::array();
        echo_entity(st.store[parent_db][i]);
      }
    }
    if (r.records.empty()) {
      return fail(ToolErrorKind::NotFound, "nothing to clear");
    }
    finish_ok(r);
    return r;
  }

  if (mode == WriteMode::Remove) {
    // The child is a selector some collection actually holds; the outputs
    // name the owner.
    std::string child_db;
    std::string parent_db;
    const AttributeNode* list = nullptr;
    for (const auto& [db, key] : args.selectors) {
      if (out_dbs.count(db)) continue;
      for (const auto& candidate : out_dbs) {
        if (const AttributeNode* l = owning_list(g, candidate, db)) {
          child_db = db;
          parent_db = candidate;
          list = l;
          break;
        }
      }
      if (list) break;
      for (const auto& candidate : g.databases()) {
        if (const AttributeNode* l = owning_list(g, candidate, db)) {
          child_db = db;
          parent_db = candidate;
          list = l;
          break;
        }
      }
      if (list) break;
    }
    if (!list) {
      return fail(ToolErrorKind::NotFound, "nothing identifies the record to remove");
    }
    std::map<std::string, const EntityInstance*> others = selected;
    others.erase(child_db);
    Rows rows = narrow_by_selectors(st, parent_db, all_rows(st, parent_db), others);
    const Json& child_key = args.selectors.at(child_db);
    bool removed = false;
    for (auto i : rows) {
      Json& lv = st.store[parent_db][i].values[list->id.attribute];
      if (!lv.is_array()) continue;
      Json pruned = Json::array();
      for (const auto& el : lv) {
        if (el == child_key) {
          removed = true;
        } else {
          pruned.push_back(el);
        }
      }
      if (removed) {
        lv = std::move(pruned);
        echo_entity(st.store[parent_db][i]);
        break;
      }
    }
    if (!removed) {
      return fail(ToolErrorKind::NotFound,
                  child_key.dump() + " is not in any " + parent_db + " collection");
    }
    finish_ok(r);
    return r;
  }

  if (mode == WriteMode::Upsert) {
    std::string target;
    for (const auto& [db, key] : args.selectors) {
      if (args.payload.count(db) || out_dbs.count(db)) {
        target = db;
        break;
      }
    }
    if (target.empty() && !args.selectors.empty()) {
      target = args.selectors.begin()->first;
    }
    if (target.empty()) {
      return fail(ToolErrorKind::NotFound, "nothing identifies the record to update");
    }
    EntityInstance* e = st.find_entity(target, args.selectors.at(target));
    std::set<std::string> written;
    auto payload = args.payload.find(target);
    if (payload != args.payload.end()) {
      for (const auto& [attr, v] : payload->second) {
        if (auto err = set_checked(g, *e, attr, v)) {
          return fail(ToolErrorKind::MissingInput, *err);
        }
        written.insert(attr);
      }
    }
    // Output attributes the caller did not provide flip to the state the
    // verb implies: enums to the matching allowed value, flags to true.
    for (const auto& out : outputs) {
      if (out.database != target || written.count(out.attribute)) continue;
      if (call.args.count(out)) continue;
      const AttributeNode* n = g.find_node(out);
      if (!n || n->is_primary_key) continue;
      if (!n->allowed_values.empty()) {
        e->values[out.attribute] = flip_target(tool.name, n->allowed_values);
      } else if (n->value_type.kind == ValueKind::Boolean) {
        e->values[out.attribute] = true;
      }
    }
    echo_entity(*e);
    for (const auto& db : out_dbs) {
      if (db == target) continue;
      const RelationEdge* edge = join_edge(g, target, db);
      if (!edge) continue;
      Rows from;
      const auto& sv = st.store.at(target);
      for (std::size_t i = 0; i < sv.size(); ++i) {
        if (&sv[i] == e) from.push_back(i);
      }
      for (auto j : join_across(st, target, from, db, *edge)) {
        echo_entity(st.store[db][j]);
      }
    }
    finish_ok(r);
    return r;
  }

  // Create mode.
  std::string child_db;
  for (const auto& [db, fields] : args.payload) {
    if (!args.selectors.count(db)) {
      child_db = db;
      break;
    }
  }

  if (child_db.empty()) {
    // No new record described: append an existing key to an owner's list
    // (add_to_wishlist style).
    for (const auto& parent_db : out_dbs) {
      for (const auto& [db, key] : args.selectors) {
        if (db == parent_db) continue;
        const AttributeNode* list = owning_list(g, parent_db, db);
        if (!list) continue;
        std::map<std::string, const EntityInstance*> others = selected;
        others.erase(db);
        Rows rows = narrow_by_selectors(st, parent_db, all_rows(st, parent_db), others);
        std::size_t idx;
        if (rows.empty()) {
          // The owner does not exist yet; bring it into being for the
          // selector it belongs to.
          EntityInstance parent;
          parent.database = parent_db;
          auto ppk = g.primary_key(parent_db);
          if (!ppk) {
            return fail(ToolErrorKind::NotFound, parent_db + " has no primary key");
          }
          parent.values[ppk->attribute] = synth_pk(st, parent_db);
          for (const auto& id : g.nodes_of(parent_db)) {
            const AttributeNode* n = g.find_node(id);
            if (!n->is_foreign_key) continue;
            const AttributeNode* t = fk_target(g, id);
            if (!t || !others.count(t->id.database)) continue;
            const Json* v = others.at(t->id.database)->find(t->id.attribute);
            if (v) parent.values[id.attribute] = *v;
          }
          fill_entity(st, parent, static_cast<int>(st.store[parent_db].size()) + 1,
                      nullptr);
          st.store[parent_db].push_back(std::move(parent));
          idx = st.store[parent_db].size() - 1;
        } else {
          idx = rows.front();
        }
        Json& lv = st.store[parent_db][idx].values[list->id.attribute];
        if (!lv.is_array()) lv = Json::array();
        if (!value_contains(lv, key)) lv.push_back(key);
        for (int pass = 0; pass < 4 && consistency_pass(st); ++pass) {
        }
        echo_entity(st.store[parent_db][idx]);
        finish_ok(r);
        return r;
      }
    }
    // Fall back to creating a bare entity in an output database whose key
    // was not supplied.
    for (const auto& db : out_dbs) {
      if (!args.selectors.count(db)) {
        child_db = db;
        break;
      }
    }
    if (child_db.empty()) {
      return fail(ToolErrorKind::NotFound, "nothing to create");
    }
  }

  auto cpk = g.primary_key(child_db);
  if (!cpk) {
    return fail(ToolErrorKind::NotFound, child_db + " has no primary key");
  }
  EntityInstance child;
  child.database = child_db;
  auto payload = args.payload.find(child_db);
  if (payload != args.payload.end()) {
    for (const auto& [attr, v] : payload->second) {
      if (auto err = set_checked(g, child, attr, v)) {
        return fail(ToolErrorKind::MissingInput, *err);
      }
    }
  }
  child.values[cpk->attribute] = synth_pk(st, child_db);
  for (const auto& id : g.nodes_of(child_db)) {
    const AttributeNode* n = g.find_node(id);
    if (!n->is_foreign_key || child.values.count(id.attribute)) continue;
    const AttributeNode* t = fk_target(g, id);
    if (!t) continue;
    if (auto sel = selected.find(t->id.database); sel != selected.end()) {
      const Json* v = sel->second->find(t->id.attribute);
      if (v) child.values[id.attribute] = *v;
    }
  }
  fill_entity(st, child, static_cast<int>(st.store[child_db].size()) + 1, nullptr);
  Json child_key = child.values.at(cpk->attribute);
  st.store[child_db].push_back(std::move(child));

  // Wire the child into an owning collection when one exists, creating the
  // owner on demand (a first add_to_cart also creates the cart).
  std::string parent_db;
  const AttributeNode* list = nullptr;
  for (const auto& db : out_dbs) {
    if (db == child_db) continue;
    if (const AttributeNode* l = owning_list(g, db, child_db)) {
      parent_db = db;
      list = l;
      break;
    }
  }
  if (list) {
    Rows rows = narrow_by_selectors(st, parent_db, all_rows(st, parent_db), selected);
    std::size_t idx;
    if (rows.empty()) {
      EntityInstance parent;
      parent.database = parent_db;
      auto ppk = g.primary_key(parent_db);
      if (!ppk) {
        return fail(ToolErrorKind::NotFound, parent_db + " has no primary key");
      }
      parent.values[ppk->attribute] = synth_pk(st, parent_db);
      for (const auto& id : g.nodes_of(parent_db)) {
        const AttributeNode* n = g.find_node(id);
        if (!n->is_foreign_key) continue;
        const AttributeNode* t = fk_target(g, id);
        if (!t || !selected.count(t->id.database)) continue;
        const Json* v = selected.at(t->id.database)->find(t->id.attribute);
        if (v) parent.values[id.attribute] = *v;
      }
      fill_entity(st, parent, static_cast<int>(st.store[parent_db].size()) + 1,
                  nullptr);
      st.store[parent_db].push_back(std::move(parent));
      idx = st.store[parent_db].size() - 1;
    } else {
      idx = rows.front();
    }
    Json& lv = st.store[parent_db][idx].values[list->id.attribute];
    if (!lv.is_array()) lv = Json::array();
    if (!value_contains(lv, child_key)) lv.push_back(child_key);
  }
  for (int pass = 0; pass < 4 && consistency_pass(st); ++pass) {
  }

  // Consistency passes can grow vectors; look everything up again by key.
  if (const EntityInstance* c = st.find_entity(child_db, child_key)) {
    echo_entity(*c);
  }
  for (const auto& db : out_dbs) {
    if (db == child_db) continue;
    if (db == parent_db && list) {
      std::map<std::string, const EntityInstance*> fresh;
      for (const auto& [sdb, key] : args.selectors) {
        fresh[sdb] = st.find_entity(sdb, key);
      }
      Rows rows = narrow_by_selectors(st, parent_db, all_rows(st, parent_db), fresh);
      if (!rows.empty()) echo_entity(st.store[parent_db][rows.front()]);
      continue;
    }
    if (auto sel = args.selectors.find(db); sel != args.selectors.end()) {
      if (const EntityInstance* e = st.find_entity(db, sel->second)) echo_entity(*e);
    }
  }
  finish_ok(r);
  return r;
}

ToolResult run_impl(SandboxState& st, const ToolCall& call) {
  const ToolSpec* tool = st.graph.find_tool(call.tool);
  if (!tool) {
    auto dep = st.deprecated.find(call.tool);
    if (dep != st.deprecated.end()) {
      return fail(ToolErrorKind::DeprecatedTool,
                  call.tool + " has been retired and is no longer available",
                  dep->second);
    }
    return fail(ToolErrorKind::UnknownTool, "unknown tool: " + call.tool);
  }
  for (const auto& in : tool->inputs) {
    if (!tool->is_optional_input(in) && !call.args.count(in)) {
      return fail(ToolErrorKind::MissingInput, "missing required input " + in.str());
    }
  }
  if (tool->kind == ToolKind::Read) return run_read(st, *tool, call);
  return run_write(st, *tool, call);
}

}  // namespace

ToolResult execute_tool(SandboxState& state, const ToolCall& call) {
  ToolResult r = run_impl(state, call);
  state.call_log.push_back(LogEntry{call, r});
  return r;
}

std::set<Fact> extract_facts(const std::vector<ToolRecord>& records) {
  std::set<Fact> out;
  for (const auto& rec : records) {
    for (const auto& [attr, value] : rec.values) {
      if (value.is_null()) continue;
      out.insert(Fact{NodeId{rec.database, attr}, rec.entity_key, value});
    }
  }
  return out;
}

Json fact_to_json(const Fact& f) {
  return Json{{"node", f.node.str()}, {"entity_key", f.entity_key}, {"value", f.value}};
}

Fact fact_from_json(const Json& j) {
  Fact f;
  f.node = NodeId::parse(j.at("node").get<std::string>());
  f.entity_key = j.at("entity_key");
  f.value = j.at("value");
  return f;
}

Json call_to_json(const ToolCall& call) {
  Json args = Json::object();
  for (const auto& [node, value] : call.args) args[node.str()] = value;
  return Json{{"tool", call.tool}, {"turn", call.turn}, {"args", std::move(args)}};
}

ToolCall call_from_json(const Json& j) {
  ToolCall call;
  call.tool = j.at("tool").get<std::string>();
  call.turn = j.value("turn", 0);
  for (const auto& [key, value] : j.at("args").items()) {
    call.args[NodeId::parse(key)] = value;
  }
  return call;
}

Json result_to_json(const ToolResult& r) {
  Json records = Json::array();
  for (const auto& rec : r.records) {
    records.push_back(Json{{"database", rec.database},
                           {"entity_key", rec.entity_key},
                           {"values", rec.values}});
  }
  Json facts = Json::array();
  for (const auto& f : r.facts) facts.push_back(fact_to_json(f));
  Json out{{"ok", r.ok},
           {"error", to_string(r.error)},
           {"message", r.message},
           {"records", std::move(records)},
           {"facts", std::move(facts)}};
  if (!r.workaround_hint.empty()) out["workaround_hint"] = r.workaround_hint;
  return out;
}

ToolResult result_from_json(const Json& j) {
  ToolResult r;
  r.ok = j.at("ok").get<bool>();
  std::string err = j.value("error", "none");
  for (auto kind : {ToolErrorKind::None, ToolErrorKind::UnknownTool,
                    ToolErrorKind::DeprecatedTool, ToolErrorKind::MissingInput,
                    ToolErrorKind::NotFound}) {
    if (to_string(kind) == err) r.error = kind;
  }
  r.message = j.value("message", std::string{});
  r.workaround_hint = j.value("workaround_hint", std::string{});
  for (const auto& rec : j.value("records", Json::array())) {
    ToolRecord t;
    t.database = rec.at("database").get<std::string>();
    t.entity_key = rec.at("entity_key");
    for (const auto& [attr, value] : rec.at("values").items()) {
      t.values[attr] = value;
    }
    r.records.push_back(std::move(t));
  }
  for (const auto& f : j.value("facts", Json::array())) {
    r.facts.insert(fact_from_json(f));
  }
  return r;
}

Json store_dump_json(const SandboxState& state) {
  Json out = Json::object();
  for (const auto& [db, entities] : state.store) {
    auto pk = state.graph.primary_key(db);
    std::vector<const EntityInstance*> ordered;
    for (const auto& e : entities) ordered.push_back(&e);
    std::sort(ordered.begin(), ordered.end(),
              [&](const EntityInstance* a, const EntityInstance* b) {
                if (pk) {
                  const Json* ka = a->find(pk->attribute);
                  const Json* kb = b->find(pk->attribute);
                  if (ka && kb && *ka != *kb) return ka->dump() < kb->dump();
                }
                return Json(a->values).dump() < Json(b->values).dump();
              });
    Json rows = Json::array();
    for (const auto* e : ordered) rows.push_back(Json(e->values));
    out[db] = std::move(rows);
  }
  return out;
}

Json state_to_json(const SandboxState& state) {
  Json log = Json::array();
  for (const auto& entry : state.call_log) {
    log.push_back(Json{{"call", call_to_json(entry.call)},
                       {"result", result_to_json(entry.result)}});
  }
  Json deprecated = Json::object();
  for (const auto& [name, hint] : state.deprecated) deprecated[name] = hint;
  return Json{{"graph", graph_to_json(state.graph)},
              {"store", store_dump_json(state)},
              {"call_log", std::move(log)},
              {"deprecated", std::move(deprecated)}};
}

SandboxState state_from_json(const Json& j) {
  SandboxState st;
  st.graph = graph_from_json(j.at("graph"));
  for (const auto& [db, rows] : j.at("store").items()) {
    for (const auto& row : rows) {
      EntityInstance e;
      e.database = db;
      for (const auto& [attr, value] : row.items()) e.values[attr] = value;
      st.store[db].push_back(std::move(e));
    }
  }
  for (const auto& entry : j.value("call_log", Json::array())) {
    st.call_log.push_back(LogEntry{call_from_json(entry.at("call")),
                                   result_from_json(entry.at("result"))});
  }
  for (const auto& [name, hint] : j.value("deprecated", Json::object()).items()) {
    st.deprecated[name] = hint.get<std::string>();
  }
  return st;
}

std::string call_log_jsonl(const SandboxState& state) {
  std::string out;
  for (const auto& entry : state.call_log) {
    Json line{{"call", call_to_json(entry.call)},
              {"result", result_to_json(entry.result)}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::string SnapshotStore::snapshot(const SandboxState& state) {
  Json doc = state_to_json(state);
  std::string text = canonical_text(doc);
  std::uint64_t h1 = Rng::hash_label(text);
  std::uint64_t h2 = Rng::hash_label(std::to_string(text.size()) + "|" + text);
  char buf[40];
  std::snprintf(buf, sizeof buf, "st-%016llx%016llx",
                static_cast<unsigned long long>(h1),
                static_cast<unsigned long long>(h2));
  std::string token = buf;
  snaps_[token] = std::move(doc);
  return token;
}

SandboxState SnapshotStore::restore(const std::string& token) const {
  auto it = snaps_.find(token);
  if (it == snaps_.end()) {
    throw UnknownTokenError("no snapshot for token " + token);
  }
  return state_from_json(it->second);
}

}  // namespace evobench

