#include "evobench/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "evobench/errors.hpp"
#include "evobench/graph_algos.hpp"
#include "evobench/graph_io.hpp"

namespace evobench {

std::array<int, 3> difficulty_counts(int count, const DifficultyMix& mix) {
  if (count < 0) throw ConfigError("task count must be >= 0");
  if (mix.easy <= 0 || mix.medium <= 0 || mix.hard <= 0) {
    throw ConfigError("difficulty mix ratios must be positive");
  }
  double total = mix.easy + mix.medium + mix.hard;
  int medium = static_cast<int>(std::lround(count * mix.medium / total));
  int hard = static_cast<int>(std::lround(count * mix.hard / total));
  int easy = count - medium - hard;
  while (easy < 0) {
    if (medium >= hard && medium > 0) {
      --medium;
    } else {
      --hard;
    }
    ++easy;
  }
  return {easy, medium, hard};
}

bool FactPattern::operator<(const FactPattern& o) const {
  if (node != o.node) return node < o.node;
  if (wildcard != o.wildcard) return wildcard < o.wildcard;
  return value.dump() < o.value.dump();
}

namespace {

struct ScopeShape {
  int min_nodes;
  int max_nodes;
  int max_databases;  // 0 = unbounded
  int min_databases;
};

ScopeShape shape_of(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return {4, 6, 2, 1};
    case Difficulty::Medium: return {7, 10, 0, 1};
    case Difficulty::Hard: return {11, 16, 0, 3};
  }
  return {4, 6, 2, 1};
}

int min_reference_turns(Difficulty d) {
  switch (d) {
    case Difficulty::Easy: return 2;
    case Difficulty::Medium: return 3;
    case Difficulty::Hard: return 4;
  }
  return 2;
}

bool is_value_join(Relationship r) {
  return r == Relationship::References || r == Relationship::Contains ||
         r == Relationship::BelongsTo;
}

/// Smallest value-join edge between two databases, either orientation.
const RelationEdge* best_join_edge(const EnvGraph& g, const std::string& a,
                                   const std::string& b) {
  const RelationEdge* best = nullptr;
  for (const auto& [key, edge] : g.edges()) {
    if (!is_value_join(edge.relationship)) continue;
    const auto& s = edge.source.database;
    const auto& t = edge.target.database;
    if (!((s == a && t == b) || (s == b && t == a))) continue;
    if (!best || key < best->key()) best = &edge;
  }
  return best;
}

/// Shortest database route over value-join edges, lexicographic ties.
/// Empty when unreachable or from == to.
std::vector<std::string> join_route(const EnvGraph& g, const std::string& from,
                                    const std::string& to) {
  if (from == to) return {};
  std::map<std::string, std::set<std::string>> adj;
  for (const auto& [key, edge] : g.edges()) {
    if (!is_value_join(edge.relationship)) continue;
    if (edge.source.database == edge.target.database) continue;
    adj[edge.source.database].insert(edge.target.database);
    adj[edge.target.database].insert(edge.source.database);
  }
  std::map<std::string, std::string> parent;
  std::vector<std::string> frontier{from};
  parent[from] = from;
  while (!frontier.empty() && !parent.count(to)) {
    std::vector<std::string> next;
    for (const auto& db : frontier) {
      for (const auto& n : adj[db]) {
        if (!parent.count(n)) {
          parent[n] = db;
          next.push_back(n);
        }
      }
    }
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
  }
  if (!parent.count(to)) return {};
  std::vector<std::string> route{to};
  while (route.back() != from) route.push_back(parent[route.back()]);
  std::reverse(route.begin(), route.end());
  return route;
}

std::set<std::string> involved_input_dbs(const ToolSpec& tool) {
  std::set<std::string> out;
  for (const auto& in : tool.inputs) {
    if (!tool.is_optional_input(in)) out.insert(in.database);
  }
  return out;
}

/// Whether the scope carries the join structure the tool needs at run time:
/// READ joins walk value-join edges between databases, WRITE selectors pin
/// the written row only through a direct value-join edge (or same database).
bool tool_routes_ok(const EnvGraph& g, const ToolSpec& tool) {
  std::set<std::string> ins = involved_input_dbs(tool);
  std::set<std::string> outs;
  for (const auto& o : tool.outputs) outs.insert(o.database);
  if (!tool.discovery_path.empty()) {
    for (const auto& id : tool.discovery_path) {
      if (!g.has_node(id)) return false;
    }
    return true;
  }
  if (tool.kind == ToolKind::Read) {
    for (const auto& i : ins) {
      for (const auto& o : outs) {
        if (i != o && join_route(g, i, o).empty()) return false;
      }
    }
    return true;
  }
  for (const auto& o : outs) {
    bool pinned = ins.count(o) > 0;
    for (const auto& i : ins) {
      if (!pinned && best_join_edge(g, i, o)) pinned = true;
    }
    if (!pinned && !ins.empty()) return false;
  }
  return true;
}

/// Nodes a tool drags along when it seeds a scope: its signature, the
/// endpoints of every edge carrying it, the endpoints of the join edges its
/// runtime routing will walk, and each touched database's key.
std::set<NodeId> tool_closure(const EnvGraph& graph, const ToolSpec& tool) {
  std::set<NodeId> out(tool.inputs.begin(), tool.inputs.end());
  out.insert(tool.outputs.begin(), tool.outputs.end());
  out.insert(tool.discovery_path.begin(), tool.discovery_path.end());
  for (const auto& [key, edge] : graph.edges()) {
    if (edge.has_tool(tool.name)) {
      out.insert(key.source);
      out.insert(key.target);
    }
  }
  std::set<std::string> ins = involved_input_dbs(tool);
  std::set<std::string> outs;
  for (const auto& o : tool.outputs) outs.insert(o.database);
  auto add_edge_nodes = [&](const RelationEdge* e) {
    if (e) {
      out.insert(e->source);
      out.insert(e->target);
    }
  };
  for (const auto& i : ins) {
    for (const auto& o : outs) {
      if (i == o) continue;
      if (tool.kind == ToolKind::Read) {
        auto route = join_route(graph, i, o);
        for (std::size_t h = 0; h + 1 < route.size(); ++h) {
          add_edge_nodes(best_join_edge(graph, route[h], route[h + 1]));
        }
      } else if (!ins.count(o)) {
        add_edge_nodes(best_join_edge(graph, i, o));
      }
    }
  }
  std::set<std::string> dbs;
  for (const auto& id : out) dbs.insert(id.database);
  for (const auto& db : dbs) {
    if (auto pk = graph.primary_key(db)) out.insert(*pk);
  }
  return out;
}

}  // namespace

EnvGraph sample_task_scope(const EnvGraph& graph, Difficulty difficulty, Rng& rng) {
  ScopeShape shape = shape_of(difficulty);

  auto db_count_of = [](const std::set<NodeId>& nodes) {
    std::set<std::string> dbs;
    for (const auto& id : nodes) dbs.insert(id.database);
    return static_cast<int>(dbs.size());
  };

  // Seed the scope with a whole tool signature so it is usable by
  // construction, then grow to size along the schema's own edges.
  std::vector<const ToolSpec*> seeds;
  for (const auto& [name, tool] : graph.tools()) {
    if (!tool_routes_ok(graph, tool)) continue;
    std::set<NodeId> closure = tool_closure(graph, tool);
    if (static_cast<int>(closure.size()) > shape.max_nodes) continue;
    if (shape.max_databases > 0 && db_count_of(closure) > shape.max_databases) {
      continue;
    }
    seeds.push_back(&tool);
  }
  if (seeds.empty()) {
    throw NoToolsInScopeError("no tool fits a " + to_string(difficulty) +
                              " scope in " + graph.version_id());
  }

  int min_tools = min_reference_turns(difficulty);

  for (int attempt = 0; attempt < 16; ++attempt) {
    const ToolSpec* seed = seeds[static_cast<std::size_t>(rng.uniform(seeds.size()))];
    std::set<NodeId> kept = tool_closure(graph, *seed);
    int target = rng.range(std::max(shape.min_nodes, static_cast<int>(kept.size())),
                           shape.max_nodes);

    auto fits = [&](const std::set<NodeId>& merged) {
      if (static_cast<int>(merged.size()) > shape.max_nodes) return false;
      if (shape.max_databases > 0 && db_count_of(merged) > shape.max_databases) {
        return false;
      }
      return true;
    };

    // Prefer pulling in whole tool closures: a scope grown node by node
    // keeps tools only by luck, and usually broken ones.
    auto merge_tool = [&]() {
      std::vector<const ToolSpec*> options;
      for (const auto* tool : seeds) {
        std::set<NodeId> merged = kept;
        std::set<NodeId> closure = tool_closure(graph, *tool);
        merged.insert(closure.begin(), closure.end());
        if (merged.size() == kept.size()) continue;
        if (!fits(merged)) continue;
        options.push_back(tool);
      }
      if (options.empty()) return false;
      std::set<NodeId> closure =
          tool_closure(graph, *options[static_cast<std::size_t>(
                                  rng.uniform(options.size()))]);
      kept.insert(closure.begin(), closure.end());
      return true;
    };

    auto grow_node = [&](bool new_db_only) {
      std::set<NodeId> frontier;
      for (const auto& id : kept) {
        for (const auto* edge : graph.edges_incident(id)) {
          for (const auto& n : {edge->source, edge->target}) {
            if (kept.count(n)) continue;
            std::set<std::string> dbs;
            for (const auto& k : kept) dbs.insert(k.database);
            bool fresh = !dbs.count(n.database);
            if (new_db_only && !fresh) continue;
            if (shape.max_databases > 0 && fresh &&
                static_cast<int>(dbs.size()) >= shape.max_databases) {
              continue;
            }
            frontier.insert(n);
          }
        }
      }
      if (frontier.empty()) return false;
      std::vector<NodeId> options(frontier.begin(), frontier.end());
      NodeId pick = options[static_cast<std::size_t>(rng.uniform(options.size()))];
      std::set<NodeId> merged = kept;
      merged.insert(pick);
      if (auto pk = graph.primary_key(pick.database)) merged.insert(*pk);
      if (!fits(merged)) return false;
      kept = std::move(merged);
      return true;
    };

    while (static_cast<int>(kept.size()) < target) {
      if (merge_tool()) continue;
      if (!grow_node(false)) break;
    }
    while (db_count_of(kept) < shape.min_databases &&
           static_cast<int>(kept.size()) < shape.max_nodes) {
      if (!grow_node(true)) break;
    }

    if (static_cast<int>(kept.size()) < shape.min_nodes) continue;
    if (static_cast<int>(kept.size()) > shape.max_nodes) continue;
    if (db_count_of(kept) < shape.min_databases) continue;

    EnvGraph sub = induce_subgraph(graph, kept);
    int usable_reads = 0, usable_writes = 0;
    for (const auto& [name, tool] : sub.tools()) {
      if (!tool_routes_ok(sub, tool)) continue;
      (tool.kind == ToolKind::Read ? usable_reads : usable_writes) += 1;
    }
    if (usable_reads + usable_writes < min_tools) continue;
    if (usable_writes < 1 && usable_reads < 2) continue;
    if (!validate(sub).ok()) continue;
    return sub;
  }
  throw NoToolsInScopeError("no usable " + to_string(difficulty) +
                            " scope found in " + graph.version_id());
}

namespace {

std::string humanize(const std::string& tool_name) {
  std::string out = tool_name;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

std::string first_verb(const std::string& tool_name) {
  auto cut = tool_name.find('_');
  return tool_name.substr(0, cut);
}

bool is_create_verb(const std::string& v) {
  static const std::set<std::string> creators{
      "add",    "create", "initiate", "open",  "book", "issue",
      "enroll", "send",   "register", "start", "place"};
  return creators.count(v) > 0;
}

std::set<NodeId> required_inputs(const ToolSpec& tool) {
  std::set<NodeId> out;
  for (const auto& in : tool.inputs) {
    if (!tool.is_optional_input(in)) out.insert(in);
  }
  return out;
}

Json literal_for(const AttributeNode& node, Rng& rng) {
  if (!node.allowed_values.empty()) return rng.pick(node.allowed_values);
  static const std::vector<std::string> words{"standard", "alternate", "compact",
                                              "deluxe", "plain"};
  switch (node.value_type.kind) {
    case ValueKind::String: return words[rng.uniform(words.size())];
    case ValueKind::Integer: return rng.range(1, 5);
    case ValueKind::Float: return rng.range(500, 9999) / 100.0;
    case ValueKind::Boolean: return true;
    case ValueKind::StringList: return Json::array({words[rng.uniform(words.size())]});
    case ValueKind::Object: return Json::object();
  }
  return Json();
}

std::string focal_key(const std::string& db, int ordinal) {
  return snake_case(db) + "_fx" + std::to_string(ordinal);
}

}  // namespace

ScenarioPlan synthesize_scenario(const EnvGraph& subgraph, int min_steps, Rng& rng) {
  std::vector<const ToolSpec*> reads, writes;
  for (const auto& [name, tool] : subgraph.tools()) {
    (tool.kind == ToolKind::Read ? reads : writes).push_back(&tool);
  }
  if (writes.empty() && reads.size() < 2) {
    throw PreconditionError("scope offers nothing to accomplish: " +
                            std::to_string(reads.size()) + " READ, 0 WRITE tools");
  }

  // Greedy seeded chain search: each tool's required inputs must be known
  // from earlier outputs or supplied by the user at that turn.
  std::vector<const ToolSpec*> best;
  for (int restart = 0; restart < 24; ++restart) {
    Rng attempt_rng = rng.fork("chain", restart);
    int target = std::min(min_steps + static_cast<int>(attempt_rng.uniform(2)), 12);
    if (static_cast<int>(best.size()) >= target) continue;
    std::vector<const ToolSpec*> chain;
    std::set<std::string> used;
    std::set<NodeId> known;

    while (static_cast<int>(chain.size()) < target) {
      bool first = chain.empty();
      bool closing = static_cast<int>(chain.size()) + 1 >= min_steps;
      bool last = static_cast<int>(chain.size()) + 1 == target;
      std::vector<const ToolSpec*> eligible_reads, eligible_writes;
      for (const auto& [name, tool] : subgraph.tools()) {
        if (used.count(name)) continue;
        if (!tool_routes_ok(subgraph, tool)) continue;
        auto req = required_inputs(tool);
        if (tool.kind == ToolKind::Read) {
          // READs discover; only the opening call takes user-given inputs.
          bool ok = true;
          for (const auto& in : req) {
            if (!known.count(in) && !first) {
              ok = false;
              break;
            }
          }
          if (!ok || req.empty()) continue;
          bool gains = false;
          for (const auto& out : tool.outputs) {
            if (!known.count(out)) gains = true;
          }
          if (!gains) continue;
          eligible_reads.push_back(&tool);
        } else {
          // WRITE gaps are fillable: key inputs name focal entities, the
          // rest are values the user states in the utterance. Destructive
          // verbs end a chain; nothing sensible follows a cleared list.
          std::string verb = first_verb(name);
          bool destructive =
              verb == "clear" || verb == "remove" || verb == "delete";
          if (destructive && !closing) continue;
          bool ok = true;
          for (const auto& in : req) {
            if (known.count(in)) continue;
            const AttributeNode* n = subgraph.find_node(in);
            if (!n) {
              ok = false;
              break;
            }
          }
          if (!ok) continue;
          eligible_writes.push_back(&tool);
        }
      }
      const ToolSpec* pick = nullptr;
      if (last && !eligible_writes.empty()) {
        pick = attempt_rng.pick(eligible_writes);
      } else if (!eligible_reads.empty()) {
        pick = attempt_rng.pick(eligible_reads);
      } else if (!eligible_writes.empty()) {
        pick = attempt_rng.pick(eligible_writes);
      }
      if (!pick) break;
      chain.push_back(pick);
      used.insert(pick->name);
      for (const auto& in : pick->inputs) known.insert(in);
      for (const auto& out : pick->outputs) known.insert(out);
      std::string verb = first_verb(pick->name);
      if (verb == "clear" || verb == "remove" || verb == "delete") break;
    }
    if (chain.size() > best.size()) best = chain;
  }
  if (static_cast<int>(best.size()) < min_steps) {
    throw ProposerError("no viable tool chain of length " +
                        std::to_string(min_steps) + " in scope");
  }

  ScenarioPlan plan;

  // Argument sources per step.
  std::set<NodeId> surfaced;
  for (const auto* tool : best) {
    PlannedCall call;
    call.tool = tool->name;
    for (const auto& in : required_inputs(*tool)) {
      PlannedArg arg;
      if (surfaced.count(in)) {
        arg.source = ArgSource::Fact;
      } else {
        const AttributeNode* n = subgraph.find_node(in);
        if (n && !n->is_primary_key && !n->is_foreign_key &&
            tool->kind == ToolKind::Write) {
          arg.source = ArgSource::Literal;
          arg.literal = literal_for(*n, rng);
        } else {
          arg.source = ArgSource::Focal;
        }
      }
      call.args[in] = arg;
    }
    plan.steps.push_back(std::move(call));
    for (const auto& out : tool->outputs) surfaced.insert(out);
  }

  // Focal entities: one per database, wired focal-to-focal so every join in
  // the chain lands; two high-degree databases also get an unrelated
  // distractor wired distractor-to-distractor. Stating an entity can
  // reference further ones, so close over references before emitting.
  auto dbs = subgraph.databases();
  std::vector<std::pair<int, std::string>> degree;
  for (const auto& db : dbs) {
    int edges = 0;
    for (const auto& id : subgraph.nodes_of(db)) {
      edges += static_cast<int>(subgraph.edges_incident(id).size());
    }
    degree.push_back({-edges, db});
  }
  std::sort(degree.begin(), degree.end());

  auto linked_dbs = [&](const std::string& db) {
    std::set<std::string> out;
    for (const auto& id : subgraph.nodes_of(db)) {
      const AttributeNode* n = subgraph.find_node(id);
      if (!n->is_foreign_key || n->is_primary_key) continue;
      const AttributeNode* target = fk_target(subgraph, id);
      if (target && target->id.database != db) out.insert(target->id.database);
    }
    return out;
  };

  std::set<std::pair<int, std::string>> to_state;
  for (const auto& db : dbs) to_state.insert({1, db});
  for (std::size_t i = 0; i < degree.size() && i < 2; ++i) {
    to_state.insert({2, degree[i].second});
  }
  for (bool grew = true; grew;) {
    grew = false;
    for (auto it = to_state.begin(); it != to_state.end(); ++it) {
      for (const auto& target : linked_dbs(it->second)) {
        grew |= to_state.insert({it->first, target}).second;
      }
    }
  }

  for (const auto& [ordinal, db] : to_state) {
    EntitySpec spec;
    spec.database = db;
    auto pk = subgraph.primary_key(db);
    spec.values[pk->attribute] = focal_key(db, ordinal);
    for (const auto& id : subgraph.nodes_of(db)) {
      const AttributeNode* n = subgraph.find_node(id);
      if (!n->is_foreign_key || n->is_primary_key) continue;
      const AttributeNode* target = fk_target(subgraph, id);
      if (!target) continue;
      Json link = focal_key(target->id.database, ordinal);
      if (n->value_type.kind == ValueKind::StringList) {
        // Reciprocal links back-fill on their own; only one-way lists
        // need stating.
        bool reciprocal = false;
        for (const auto& other : subgraph.nodes_of(target->id.database)) {
          const AttributeNode* t = fk_target(subgraph, other);
          if (t && t->id.database == db) reciprocal = true;
        }
        if (!reciprocal) spec.values[id.attribute] = Json::array({link});
      } else {
        spec.values[id.attribute] = link;
      }
    }
    plan.prerequisites.push_back(std::move(spec));
  }

  // Goal and scenario text keyed on the closing tool.
  const ToolSpec* final_tool = best.back();
  std::string final_db =
      final_tool->outputs.empty() ? "" : final_tool->outputs.front().database;
  std::string verb = first_verb(final_tool->name);
  if (final_tool->kind == ToolKind::Write) {
    if (verb == "clear") {
      plan.goal = "Empty out the customer's " + humanize(snake_case(final_db)) +
                  " for them (" + final_tool->name + ").";
    } else if (verb == "remove" || verb == "delete") {
      plan.goal = "Take an entry the customer no longer wants out of their " +
                  humanize(snake_case(final_db)) + " (" + final_tool->name + ").";
    } else if (is_create_verb(verb)) {
      plan.goal = "Set up a new " +
                  humanize(snake_case(final_tool->outputs.front().database)) +
                  " record for the customer (" + final_tool->name + ").";
    } else {
      plan.goal = "Apply the customer's requested change to their " +
                  humanize(snake_case(final_db)) + " (" + final_tool->name + ").";
    }
  } else {
    plan.goal = "Track down the customer's " + humanize(snake_case(final_db)) +
                " details (" + final_tool->name + ").";
  }
  std::string anchor =
      best.front()->inputs.empty() ? final_db : best.front()->inputs.front().database;
  plan.text = "A customer contacts support about their " +
              humanize(snake_case(anchor)) +
              " records. They identify themselves with the details they "
              "provide and expect the request to be finished within this "
              "conversation.";
  return plan;
}

namespace {

std::string plain_value(const Json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

std::string render_reveals(const SandboxState& state,
                           const std::map<NodeId, Json>& revealed) {
  std::string out;
  for (const auto& [node, value] : revealed) {
    if (!out.empty()) out += ", ";
    out += "my " + humanize(node.attribute) + " is " + plain_value(value);
  }
  (void)state;
  return out;
}

std::string render_utterance(const SandboxState& state, const ScenarioPlan& plan,
                             const ToolSpec& tool, int turn,
                             const std::map<NodeId, Json>& revealed) {
  std::string bits = render_reveals(state, revealed);
  if (turn == 1) {
    std::string u = "Hi! I'm hoping you can help me. " + plan.goal;
    if (!bits.empty()) u += " For reference: " + bits + ".";
    return u;
  }
  if (tool.kind == ToolKind::Write) {
    std::string u = "Please go ahead and " + humanize(tool.name) + " for me";
    if (!bits.empty()) u += "; " + bits;
    return u + ".";
  }
  std::string target_db = tool.outputs.empty()
                              ? "record"
                              : humanize(snake_case(tool.outputs.front().database));
  std::string u = "Thanks. Could you pull up my " + target_db + " details next";
  if (!bits.empty()) u += "? " + bits + ". Use that";
  return u + ".";
}

std::vector<FactPattern> derive_criteria(const EnvGraph& subgraph,
                                         const ToolSpec& tool, const ToolCall& call,
                                         const std::set<Fact>& turn_facts) {
  std::map<NodeId, std::vector<const Fact*>> by_node;
  for (const auto& f : turn_facts) by_node[f.node].push_back(&f);

  std::set<FactPattern> out;
  for (const auto& [node, facts] : by_node) {
    FactPattern p;
    p.node = node;
    p.wildcard = true;
    if (tool.kind == ToolKind::Write && facts.size() == 1) {
      const AttributeNode* n = subgraph.find_node(node);
      const Fact& f = *facts.front();
      bool chosen = false;
      auto arg = call.args.find(node);
      if (arg != call.args.end() && arg->second == f.value) chosen = true;
      bool flipish = n && !n->is_primary_key &&
                     (n->value_type.kind == ValueKind::Boolean ||
                      !n->allowed_values.empty());
      if ((chosen || flipish) && n && !n->is_primary_key &&
          n->value_type.kind != ValueKind::StringList) {
        p.wildcard = false;
        p.value = f.value;
      }
    }
    out.insert(std::move(p));
  }
  return {out.begin(), out.end()};
}

}  // namespace

WalkOutput agentic_walk(const EnvGraph& subgraph, SandboxState& state,
                        const ScenarioPlan& plan, int max_turns, Rng& rng) {
  (void)rng;
  if (static_cast<int>(plan.steps.size()) > max_turns) {
    throw WalkStuckError("plan exceeds max_turns");
  }
  WalkOutput out;
  std::set<Fact> knowledge;
  std::set<NodeId> known_nodes;
  std::set<NodeId> active;

  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const PlannedCall& planned = plan.steps[i];
    const ToolSpec* tool = subgraph.find_tool(planned.tool);
    if (!tool) throw WalkStuckError("planned tool missing from scope: " + planned.tool);
    int turn = static_cast<int>(i) + 1;

    ToolCall call;
    call.tool = planned.tool;
    call.turn = turn;
    std::map<NodeId, Json> revealed;
    for (const auto& [node, arg] : planned.args) {
      switch (arg.source) {
        case ArgSource::Focal: {
          auto it = state.store.find(node.database);
          if (it == state.store.end() || it->second.empty()) {
            throw WalkStuckError("no focal entity for " + node.database);
          }
          const Json* v = it->second.front().find(node.attribute);
          if (!v || v->is_null()) {
            throw WalkStuckError("focal entity lacks " + node.str());
          }
          call.args[node] = *v;
          revealed[node] = *v;
          break;
        }
        case ArgSource::Fact: {
          const Fact* hit = nullptr;
          for (const auto& f : knowledge) {
            if (f.node == node) {
              hit = &f;
              break;
            }
          }
          if (!hit) throw WalkStuckError("no surfaced fact for " + node.str());
          call.args[node] = hit->value;
          break;
        }
        case ArgSource::Literal:
          call.args[node] = arg.literal;
          revealed[node] = arg.literal;
          break;
      }
    }

    // Frontier rule: the tool fires only when its required inputs are
    // already known or revealed this turn.
    for (const auto& in : required_inputs(*tool)) {
      if (!known_nodes.count(in) && !revealed.count(in)) {
        throw WalkStuckError(planned.tool + " requires " + in.str() +
                             " which is neither known nor revealed");
      }
    }
    if (i == 0) {
      for (const auto& [node, value] : revealed) active.insert(node);
      out.reference.initial_active = active;
      known_nodes = active;
    } else {
      for (const auto& [node, value] : revealed) known_nodes.insert(node);
    }

    ToolResult result = execute_tool(state, call);
    if (!result.ok) {
      throw WalkStuckError(planned.tool + " failed during the oracle walk: " +
                           result.message);
    }
    if (result.facts.empty()) {
      throw WalkStuckError(planned.tool + " surfaced no facts");
    }

    std::set<Fact> delta;
    for (const auto& f : result.facts) {
      if (!knowledge.count(f)) delta.insert(f);
    }
    knowledge.insert(result.facts.begin(), result.facts.end());
    for (const auto& f : result.facts) known_nodes.insert(f.node);

    for (const auto& in : tool->inputs) active.insert(in);
    for (const auto& o : tool->outputs) active.insert(o);

    StateInstruction instruction;
    instruction.turn = turn;
    instruction.utterance = render_utterance(state, plan, *tool, turn, revealed);
    instruction.criteria = derive_criteria(subgraph, *tool, call, result.facts);
    if (instruction.criteria.empty()) {
      throw WalkStuckError("empty success criterion at turn " + std::to_string(turn));
    }
    out.instructions.push_back(std::move(instruction));

    ReferenceTurn ref;
    ref.action = call;
    ref.facts = std::move(delta);
    ref.active = active;
    out.reference.turns.push_back(std::move(ref));
  }
  out.reference.final_knowledge = std::move(knowledge);
  return out;
}

SandboxState restore_task_state(const TaskInstance& task) {
  Json doc{{"graph", graph_to_json(task.subgraph)}, {"store", task.store_dump}};
  return state_from_json(doc);
}

bool replay_reference(const TaskInstance& task) {
  SandboxState st = restore_task_state(task);
  std::set<Fact> knowledge;
  std::set<NodeId> prev_active = task.reference.initial_active;
  auto subgraph_nodes = [&](const std::set<NodeId>& nodes) {
    for (const auto& id : nodes) {
      if (!task.subgraph.has_node(id)) return false;
    }
    return true;
  };
  if (!subgraph_nodes(prev_active)) return false;
  for (const auto& turn : task.reference.turns) {
    ToolResult r = execute_tool(st, turn.action);
    if (!r.ok) return false;
    std::set<Fact> delta;
    for (const auto& f : r.facts) {
      if (!knowledge.count(f)) delta.insert(f);
    }
    if (delta != turn.facts) return false;
    knowledge.insert(r.facts.begin(), r.facts.end());
    if (!std::includes(turn.active.begin(), turn.active.end(), prev_active.begin(),
                       prev_active.end())) {
      return false;
    }
    if (!subgraph_nodes(turn.active)) return false;
    prev_active = turn.active;
  }
  return knowledge == task.reference.final_knowledge;
}

std::vector<TaskInstance> generate_tasks(const EnvGraph& env, int count,
                                         const DifficultyMix& mix, Rng& rng,
                                         int max_turns, SnapshotStore* snapshots) {
  auto split = difficulty_counts(count, mix);
  std::vector<Difficulty> slots;
  for (int i = 0; i < split[0]; ++i) slots.push_back(Difficulty::Easy);
  for (int i = 0; i < split[1]; ++i) slots.push_back(Difficulty::Medium);
  for (int i = 0; i < split[2]; ++i) slots.push_back(Difficulty::Hard);

  std::vector<TaskInstance> out;
  for (std::size_t slot = 0; slot < slots.size(); ++slot) {
    Difficulty difficulty = slots[slot];
    int min_turns = min_reference_turns(difficulty);
    Rng slot_rng = rng.fork("task_slot", slot);
    bool done = false;
    std::string last_error = "unknown";
    for (int attempt = 0; attempt < 5 && !done; ++attempt) {
      Rng a_rng = slot_rng.fork("attempt", attempt);
      try {
        EnvGraph scope = sample_task_scope(env, difficulty, a_rng);
        ScenarioPlan plan = synthesize_scenario(scope, min_turns, a_rng);
        SandboxState initial = materialize(scope, plan.prerequisites, a_rng);

        TaskInstance task;
        task.task_id = env.version_id() + ":task_" + std::to_string(slot);
        task.env_version = env.version_id();
        task.difficulty = difficulty;
        task.goal = plan.goal;
        task.scenario.text = plan.text;
        task.scenario.prerequisites = plan.prerequisites;
        task.subgraph = scope;
        task.store_dump = store_dump_json(initial);
        {
          SnapshotStore local;
          SnapshotStore& reg = snapshots ? *snapshots : local;
          task.snapshot_token = reg.snapshot(initial);
        }

        SandboxState working = initial;
        WalkOutput walk = agentic_walk(scope, working, plan, max_turns, a_rng);
        if (static_cast<int>(walk.reference.turns.size()) < min_turns) {
          throw WalkStuckError("reference shorter than the difficulty floor");
        }
        task.instructions = std::move(walk.instructions);
        task.reference = std::move(walk.reference);

        if (!replay_reference(task)) {
          throw WalkStuckError("reference replay diverged");
        }
        out.push_back(std::move(task));
        done = true;
      } catch (const Error& e) {
        last_error = e.what();
      }
    }
    if (!done) {
      throw Error("task slot " + std::to_string(slot) + " (" +
                  to_string(difficulty) + ") failed after 5 attempts: " + last_error);
    }
  }
  return out;
}

Json pattern_to_json(const FactPattern& p) {
  return Json{{"node", p.node.str()}, {"value", p.wildcard ? Json("*") : p.value}};
}

FactPattern pattern_from_json(const Json& j) {
  FactPattern p;
  p.node = NodeId::parse(j.at("node").get<std::string>());
  const Json& v = j.at("value");
  if (v.is_string() && v.get<std::string>() == "*") {
    p.wildcard = true;
  } else {
    p.value = v;
  }
  return p;
}

namespace {

Json facts_to_json(const std::set<Fact>& facts) {
  Json out = Json::array();
  for (const auto& f : facts) out.push_back(fact_to_json(f));
  return out;
}

std::set<Fact> facts_from_json(const Json& j) {
  std::set<Fact> out;
  for (const auto& f : j) out.insert(fact_from_json(f));
  return out;
}

Json nodes_to_json(const std::set<NodeId>& nodes) {
  Json out = Json::array();
  for (const auto& n : nodes) out.push_back(n.str());
  return out;
}

std::set<NodeId> nodes_from_json(const Json& j) {
  std::set<NodeId> out;
  for (const auto& n : j) out.insert(NodeId::parse(n.get<std::string>()));
  return out;
}

}  // namespace

Json task_to_json(const TaskInstance& task) {
  Json prereqs = Json::array();
  for (const auto& spec : task.scenario.prerequisites) {
    prereqs.push_back(Json{{"database", spec.database}, {"values", spec.values}});
  }
  Json instructions = Json::array();
  for (const auto& ins : task.instructions) {
    Json criteria = Json::array();
    for (const auto& p : ins.criteria) criteria.push_back(pattern_to_json(p));
    instructions.push_back(Json{{"turn", ins.turn},
                                {"utterance", ins.utterance},
                                {"criteria", std::move(criteria)}});
  }
  Json turns = Json::array();
  for (const auto& t : task.reference.turns) {
    turns.push_back(Json{{"action", call_to_json(t.action)},
                         {"facts", facts_to_json(t.facts)},
                         {"active", nodes_to_json(t.active)}});
  }
  return Json{
      {"task_id", task.task_id},
      {"env_version", task.env_version},
      {"difficulty", to_string(task.difficulty)},
      {"goal", task.goal},
      {"scenario", Json{{"text", task.scenario.text}, {"prerequisites", prereqs}}},
      {"subgraph", graph_to_json(task.subgraph)},
      {"initial_state",
       Json{{"snapshot_token", task.snapshot_token}, {"store", task.store_dump}}},
      {"instructions", std::move(instructions)},
      {"reference",
       Json{{"initial_active", nodes_to_json(task.reference.initial_active)},
            {"turns", std::move(turns)},
            {"final_knowledge", facts_to_json(task.reference.final_knowledge)}}}};
}

TaskInstance task_from_json(const Json& j) {
  TaskInstance task;
  task.task_id = j.at("task_id").get<std::string>();
  task.env_version = j.at("env_version").get<std::string>();
  task.difficulty = parse_difficulty(j.at("difficulty").get<std::string>());
  task.goal = j.at("goal").get<std::string>();
  task.scenario.text = j.at("scenario").at("text").get<std::string>();
  for (const auto& p : j.at("scenario").at("prerequisites")) {
    EntitySpec spec;
    spec.database = p.at("database").get<std::string>();
    for (const auto& [attr, value] : p.at("values").items()) {
      spec.values[attr] = value;
    }
    task.scenario.prerequisites.push_back(std::move(spec));
  }
  task.subgraph = graph_from_json(j.at("subgraph"));
  task.snapshot_token = j.at("initial_state").at("snapshot_token").get<std::string>();
  task.store_dump = j.at("initial_state").at("store");
  for (const auto& ins : j.at("instructions")) {
    StateInstruction instruction;
    instruction.turn = ins.at("turn").get<int>();
    instruction.utterance = ins.at("utterance").get<std::string>();
    for (const auto& c : ins.at("criteria")) {
      instruction.criteria.push_back(pattern_from_json(c));
    }
    task.instructions.push_back(std::move(instruction));
  }
  const Json& ref = j.at("reference");
  task.reference.initial_active = nodes_from_json(ref.at("initial_active"));
  for (const auto& t : ref.at("turns")) {
    ReferenceTurn turn;
    turn.action = call_from_json(t.at("action"));
    turn.facts = facts_from_json(t.at("facts"));
    turn.active = nodes_from_json(t.at("active"));
    task.reference.turns.push_back(std::move(turn));
  }
  task.reference.final_knowledge = facts_from_json(ref.at("final_knowledge"));
  return task;
}

void write_tasks(const std::string& dir, const std::vector<TaskInstance>& tasks) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    write_text_file(dir + "/task_" + std::to_string(i) + ".json",
                    canonical_text(task_to_json(tasks[i])));
  }
}

std::vector<TaskInstance> read_tasks(const std::string& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("task_", 0) == 0 && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    auto index = [](const std::filesystem::path& p) {
      std::string stem = p.stem().string();
      return std::stoi(stem.substr(5));
    };
    return index(a) < index(b);
  });
  std::vector<TaskInstance> out;
  for (const auto& f : files) {
    out.push_back(task_from_json(read_json_file(f.string())));
  }
  return out;
}

}  // namespace evobench
