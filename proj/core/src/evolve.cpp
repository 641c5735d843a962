#include "evobench/evolve.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "evobench/errors.hpp"
#include "evobench/graph_algos.hpp"
#include "evobench/graph_io.hpp"

namespace evobench {

namespace {

bool is_join_predicate(Relationship r) {
  return r == Relationship::References || r == Relationship::Contains ||
         r == Relationship::BelongsTo;
}

/// True when rows of one database can be matched to rows of the other, i.e.
/// some foreign-key-like edge ties the two schemas together.
bool databases_joinable(const EnvGraph& graph, const std::string& a,
                        const std::string& b) {
  for (const auto& [key, edge] : graph.edges()) {
    if (!is_join_predicate(edge.relationship)) continue;
    const std::string& s = edge.source.database;
    const std::string& t = edge.target.database;
    if ((s == a && t == b) || (s == b && t == a)) return true;
  }
  return false;
}

bool hop_exists(const EnvGraph& graph, const NodeId& from, const NodeId& to) {
  for (const auto* e : graph.out_edges(from)) {
    if (e->target == to) return true;
  }
  return false;
}

/// Tools knocked out by a removal: any tool whose inputs, outputs, or
/// discovery path touch a removed node, plus any tool riding a removed edge
/// (listed on it, or stepping over it in its discovery path).
std::vector<std::string> affected_tools(const EnvGraph& graph,
                                        const std::set<NodeId>& removed_nodes,
                                        const std::set<EdgeKey>& removed_edges) {
  std::set<std::pair<NodeId, NodeId>> removed_hops;
  std::set<std::string> out;
  for (const auto& key : removed_edges) {
    removed_hops.emplace(key.source, key.target);
    if (const auto* e = graph.find_edge(key)) {
      for (const auto& name : e->tools) out.insert(name);
    }
  }
  for (const auto& [name, tool] : graph.tools()) {
    bool hit = false;
    auto touches = [&](const std::vector<NodeId>& ids) {
      for (const auto& id : ids) {
        if (removed_nodes.count(id)) return true;
      }
      return false;
    };
    hit = touches(tool.inputs) || touches(tool.outputs) || touches(tool.discovery_path);
    for (std::size_t i = 0; !hit && i + 1 < tool.discovery_path.size(); ++i) {
      hit = removed_hops.count(
                {tool.discovery_path[i], tool.discovery_path[i + 1]}) != 0;
    }
    if (hit) out.insert(name);
  }
  return {out.begin(), out.end()};
}

[[noreturn]] void fail_proposal(const std::string& stage, const std::string& why) {
  throw ProposerError(stage + " proposal rejected: " + why);
}

}  // namespace

GraphDelta generate_completion(const EnvGraph& graph, Proposer& proposer, Rng& rng) {
  CompletionProposal p = proposer.propose_completion(graph, rng);

  if (p.new_databases.empty()) fail_proposal("completion", "no new databases");
  std::set<std::string> new_dbs(p.new_databases.begin(), p.new_databases.end());
  for (const auto& db : new_dbs) {
    if (graph.databases().count(db)) {
      fail_proposal("completion", "database already exists: " + db);
    }
  }

  if (p.new_nodes.empty()) fail_proposal("completion", "no new nodes");
  std::set<NodeId> new_nodes;
  std::map<std::string, int> pk_count;
  for (const auto& node : p.new_nodes) {
    if (!new_dbs.count(node.id.database)) {
      fail_proposal("completion",
                    "node outside the new databases: " + node.id.str());
    }
    if (graph.has_node(node.id) || !new_nodes.insert(node.id).second) {
      fail_proposal("completion", "duplicate node: " + node.id.str());
    }
    if (node.is_primary_key) ++pk_count[node.id.database];
  }
  for (const auto& db : new_dbs) {
    if (pk_count[db] != 1) {
      fail_proposal("completion", "database " + db + " needs exactly one primary key");
    }
  }

  auto known_node = [&](const NodeId& id) {
    return graph.has_node(id) || new_nodes.count(id) != 0;
  };
  std::set<std::string> new_tool_names;
  for (const auto& tool : p.new_tools) new_tool_names.insert(tool.name);

  bool connected_to_old = false;
  std::set<EdgeKey> new_edge_keys;
  for (const auto& edge : p.new_edges) {
    if (!known_node(edge.source) || !known_node(edge.target)) {
      fail_proposal("completion", "edge endpoint unknown: " + edge.key().str());
    }
    if (graph.has_edge(edge.key()) || !new_edge_keys.insert(edge.key()).second) {
      fail_proposal("completion", "duplicate edge: " + edge.key().str());
    }
    for (const auto& name : edge.tools) {
      if (!new_tool_names.count(name) && !graph.has_tool(name)) {
        fail_proposal("completion", "edge lists unknown tool: " + name);
      }
    }
    if (graph.has_node(edge.source) != graph.has_node(edge.target)) {
      connected_to_old = true;
    }
  }
  if (p.new_edges.empty()) fail_proposal("completion", "no new edges");
  if (!connected_to_old) {
    fail_proposal("completion", "new databases form an island");
  }

  if (p.new_tools.empty()) fail_proposal("completion", "no new tools");
  if (new_tool_names.size() != p.new_tools.size()) {
    fail_proposal("completion", "duplicate tool names");
  }
  for (const auto& tool : p.new_tools) {
    if (graph.has_tool(tool.name)) {
      fail_proposal("completion", "tool already exists: " + tool.name);
    }
    if (tool.inputs.empty() || tool.outputs.empty()) {
      fail_proposal("completion", "tool " + tool.name + " has empty inputs or outputs");
    }
    for (const auto& id : tool.inputs) {
      if (!known_node(id)) {
        fail_proposal("completion", "tool " + tool.name + " input unknown: " + id.str());
      }
    }
    for (const auto& id : tool.outputs) {
      if (!known_node(id)) {
        fail_proposal("completion",
                      "tool " + tool.name + " output unknown: " + id.str());
      }
    }
    for (const auto& id : tool.optional_inputs) {
      if (std::find(tool.inputs.begin(), tool.inputs.end(), id) == tool.inputs.end()) {
        fail_proposal("completion", "tool " + tool.name +
                                        " optional input not an input: " + id.str());
      }
    }
  }

  GraphDelta delta;
  delta.strategy = Strategy::Completion;
  delta.added_nodes = p.new_nodes;
  delta.added_edges = p.new_edges;
  delta.added_tools = p.new_tools;

  delta.context.strategy = Strategy::Completion;
  delta.context.title = p.task_name;
  std::string narrative = p.user_story;
  for (const auto& gap : p.capability_gaps) narrative += "\nGap: " + gap;
  if (!p.rationale.empty()) narrative += "\n" + p.rationale;
  delta.context.narrative = narrative;
  Json tool_names = Json::array();
  for (const auto& t : p.new_tools) tool_names.push_back(t.name);
  delta.context.metadata = {{"task_name", p.task_name},
                            {"capability_gaps", p.capability_gaps},
                            {"new_databases", p.new_databases},
                            {"new_tools", tool_names}};

  EnvGraph next = apply_delta(graph, delta);
  auto report = validate(next);
  if (!report.ok()) {
    fail_proposal("completion", "result does not validate: " + report.summary());
  }
  return delta;
}

GraphDelta generate_saturation(const EnvGraph& graph, Proposer& proposer, Rng& rng,
                               int num_tools, WalkBounds bounds) {
  if (num_tools < 1) {
    GraphDelta delta;
    delta.strategy = Strategy::Saturation;
    delta.context.strategy = Strategy::Saturation;
    delta.context.title = "Shortcut tools for common lookups";
    delta.context.narrative = "No shortcut tools were requested this round.";
    delta.context.metadata = {{"new_tools", Json::array()},
                              {"discovery_paths", Json::array()}};
    return delta;
  }

  std::vector<NodeId> starts;
  for (const auto& [id, node] : graph.nodes()) {
    if (!graph.out_edges(id).empty()) starts.push_back(id);
  }

  // Walks over-sample; normalization and filtering thin the crop.
  std::set<std::vector<NodeId>> seen;
  std::vector<std::vector<NodeId>> candidates;
  const int attempts = 24 + 12 * num_tools;
  for (int i = 0; i < attempts && !starts.empty(); ++i) {
    const NodeId& start = starts[static_cast<std::size_t>(rng.uniform(starts.size()))];
    std::vector<NodeId> path;
    try {
      path = random_walk(graph, start, bounds.min_hops, bounds.max_hops, rng);
    } catch (const NoPathError&) {
      continue;
    }

    // A walk starting mid-record is keyed on its record's primary key.
    const auto& front = path.front();
    const auto* front_node = graph.find_node(front);
    if (front_node && !front_node->is_primary_key) {
      if (auto pk = graph.primary_key(front.database)) {
        bool on_path = std::find(path.begin(), path.end(), *pk) != path.end();
        if (!on_path && hop_exists(graph, *pk, front)) {
          path.insert(path.begin(), *pk);
        }
      }
    }

    if (path.front().database == path.back().database) continue;
    bool joinable = true;
    for (std::size_t h = 0; joinable && h + 1 < path.size(); ++h) {
      const auto& a = path[h].database;
      const auto& b = path[h + 1].database;
      joinable = a == b || databases_joinable(graph, a, b);
    }
    if (!joinable) continue;
    if (graph.has_edge({path.front(), path.back(), Relationship::LinksTo}) ||
        graph.has_edge({path.front(), path.back(), Relationship::Aggregates})) {
      continue;
    }
    if (seen.insert(path).second) candidates.push_back(path);
  }
  if (candidates.empty()) {
    throw NoCandidatesError("saturation found no joinable shortcut paths");
  }
  std::sort(candidates.begin(), candidates.end());

  std::vector<ShortcutCandidate> chosen =
      proposer.select_shortcuts(graph, candidates, num_tools, rng);
  std::size_t expected =
      std::min<std::size_t>(static_cast<std::size_t>(num_tools), candidates.size());
  if (chosen.size() != expected) {
    fail_proposal("saturation", "expected " + std::to_string(expected) +
                                    " shortcut tools, got " +
                                    std::to_string(chosen.size()));
  }

  GraphDelta delta;
  delta.strategy = Strategy::Saturation;
  std::set<std::string> names;
  std::map<EdgeKey, RelationEdge> fresh_edges;
  std::map<EdgeKey, RelationEdge> edited_edges;
  Json paths_meta = Json::object();

  for (const auto& c : chosen) {
    if (c.path.size() < 2) fail_proposal("saturation", "path too short");
    for (std::size_t h = 0; h + 1 < c.path.size(); ++h) {
      if (!hop_exists(graph, c.path[h], c.path[h + 1])) {
        fail_proposal("saturation", "path hop not in graph: " + c.path[h].str() +
                                        " -> " + c.path[h + 1].str());
      }
    }
    std::set<NodeId> on_path(c.path.begin(), c.path.end());
    if (c.proposed_inputs.empty() || c.proposed_outputs.empty()) {
      fail_proposal("saturation", "tool " + c.tool_name + " has empty signature");
    }
    for (const auto& id : c.proposed_inputs) {
      if (!on_path.count(id)) {
        fail_proposal("saturation", "input off the path: " + id.str());
      }
    }
    for (const auto& id : c.proposed_outputs) {
      if (!on_path.count(id)) {
        fail_proposal("saturation", "output off the path: " + id.str());
      }
      if (std::find(c.proposed_inputs.begin(), c.proposed_inputs.end(), id) !=
          c.proposed_inputs.end()) {
        fail_proposal("saturation", "input/output overlap: " + id.str());
      }
    }
    if (c.tool_name.empty() || graph.has_tool(c.tool_name) ||
        !names.insert(c.tool_name).second) {
      fail_proposal("saturation", "unusable tool name: " + c.tool_name);
    }

    ToolSpec tool;
    tool.name = c.tool_name;
    tool.kind = ToolKind::Read;
    tool.inputs = c.proposed_inputs;
    tool.outputs = c.proposed_outputs;
    tool.discovery_path = c.path;
    tool.description = c.description;
    delta.added_tools.push_back(tool);

    Json path_json = Json::array();
    for (const auto& id : c.path) path_json.push_back(id.str());
    paths_meta[c.tool_name] = path_json;

    Relationship rel = c.proposed_outputs.size() >= 2 ? Relationship::Aggregates
                                                      : Relationship::LinksTo;
    EdgeKey key{c.proposed_inputs.front(), c.proposed_outputs.back(), rel};
    if (graph.has_edge(key)) {
      auto [it, inserted] = edited_edges.try_emplace(key, *graph.find_edge(key));
      (void)inserted;
      it->second.tools.push_back(c.tool_name);
    } else {
      auto [it, inserted] = fresh_edges.try_emplace(key);
      if (inserted) {
        it->second.source = key.source;
        it->second.target = key.target;
        it->second.relationship = rel;
        it->second.cardinality = Cardinality::OneToMany;
        it->second.description = "Shortcut access from " + key.source.str() + " to " +
                                 key.target.str();
      }
      it->second.tools.push_back(c.tool_name);
    }
  }
  for (const auto& [key, edge] : edited_edges) {
    delta.removed_edges.push_back(*graph.find_edge(key));
    delta.added_edges.push_back(edge);
  }
  for (const auto& [key, edge] : fresh_edges) delta.added_edges.push_back(edge);

  delta.context.strategy = Strategy::Saturation;
  Json tool_names = Json::array();
  std::string narrative = "Frequent multi-step lookups get direct tools:";
  for (const auto& t : delta.added_tools) {
    tool_names.push_back(t.name);
    narrative += "\n" + t.name + " walks " + t.discovery_path.front().str() + " to " +
                 t.discovery_path.back().str() + " in one call.";
  }
  delta.context.title = "Shortcut tools for common lookups";
  delta.context.narrative = narrative;
  delta.context.metadata = {{"new_tools", tool_names}, {"discovery_paths", paths_meta}};

  EnvGraph next = apply_delta(graph, delta);
  auto report = validate(next);
  if (!report.ok()) {
    fail_proposal("saturation", "result does not validate: " + report.summary());
  }
  return delta;
}

std::vector<DeprecationCandidate> sample_deprecation_candidates(
    const EnvGraph& graph, Rng& rng, std::size_t max_candidates) {
  std::vector<DeprecationCandidate> out;

  for (const auto& key : find_bridges(graph)) {
    if (key.source.database == key.target.database) continue;
    DeprecationCandidate c;
    c.kind = CandidateKind::Bridge;
    c.candidate_id = "bridge:" + key.str();
    c.removed_edges = {*graph.find_edge(key)};
    c.affected_tools = affected_tools(graph, {}, {key});
    out.push_back(std::move(c));
  }

  if (graph.databases().size() > 1) {
    for (const auto& db : graph.databases()) {
      std::set<std::string> referrers;
      for (const auto& [key, edge] : graph.edges()) {
        if (edge.relationship == Relationship::References &&
            edge.target.database == db && edge.source.database != db) {
          referrers.insert(edge.source.database);
        }
      }
      // Heavily referenced stores stay; ripping them out would gut the graph.
      if (referrers.size() >= 3) continue;

      DeprecationCandidate c;
      c.kind = CandidateKind::Database;
      c.candidate_id = "database:" + db;
      std::set<NodeId> node_set;
      for (const auto& id : graph.nodes_of(db)) {
        node_set.insert(id);
        c.removed_nodes.push_back(*graph.find_node(id));
      }
      std::set<EdgeKey> edge_keys;
      for (const auto& [key, edge] : graph.edges()) {
        if (node_set.count(edge.source) || node_set.count(edge.target)) {
          if (edge_keys.insert(key).second) c.removed_edges.push_back(edge);
        }
      }
      c.affected_tools = affected_tools(graph, node_set, edge_keys);
      out.push_back(std::move(c));
    }
  }

  for (const auto& [key, edge] : graph.edges()) {
    if (graph.edges_incident(edge.target).size() != 1) continue;
    DeprecationCandidate c;
    c.kind = CandidateKind::PeripheralEdge;
    c.candidate_id = "peripheral_edge:" + key.str();
    c.removed_edges = {edge};
    std::set<NodeId> node_set;
    const auto* target = graph.find_node(edge.target);
    if (target && !target->is_primary_key) {
      c.removed_nodes.push_back(*target);
      node_set.insert(target->id);
    }
    c.affected_tools = affected_tools(graph, node_set, {key});
    out.push_back(std::move(c));
  }

  auto order = [](const DeprecationCandidate& a, const DeprecationCandidate& b) {
    auto ka = to_string(a.kind);
    auto kb = to_string(b.kind);
    if (ka != kb) return ka < kb;
    return a.candidate_id < b.candidate_id;
  };
  std::sort(out.begin(), out.end(), order);
  if (out.size() > max_candidates) {
    rng.shuffle(out);
    out.resize(max_candidates);
    std::sort(out.begin(), out.end(), order);
  }
  return out;
}

GraphDelta generate_deprecation(const EnvGraph& graph, Proposer& proposer, Rng& rng) {
  std::vector<DeprecationCandidate> candidates =
      sample_deprecation_candidates(graph, rng);
  if (candidates.empty()) {
    throw NoCandidatesError("nothing in the graph can be deprecated");
  }

  DeprecationDecision decision = proposer.select_deprecation(graph, candidates, rng);
  const DeprecationCandidate* chosen = nullptr;
  for (const auto& c : candidates) {
    if (c.candidate_id == decision.candidate_id) chosen = &c;
  }
  if (!chosen) {
    fail_proposal("deprecation",
                  "decision names no sampled candidate: " + decision.candidate_id);
  }

  GraphDelta delta;
  delta.strategy = Strategy::Deprecation;
  delta.removed_nodes = chosen->removed_nodes;
  delta.removed_edges = chosen->removed_edges;
  std::set<EdgeKey> removed_keys;
  for (const auto& e : chosen->removed_edges) removed_keys.insert(e.key());
  std::set<std::string> gone(chosen->affected_tools.begin(),
                             chosen->affected_tools.end());
  for (const auto& name : chosen->affected_tools) {
    delta.removed_tools.push_back(*graph.find_tool(name));
  }

  // Surviving edges shed retired tool names via a remove + add pair.
  for (const auto& [key, edge] : graph.edges()) {
    if (removed_keys.count(key)) continue;
    std::vector<std::string> kept;
    for (const auto& name : edge.tools) {
      if (!gone.count(name)) kept.push_back(name);
    }
    if (kept.size() != edge.tools.size()) {
      RelationEdge updated = edge;
      updated.tools = std::move(kept);
      delta.removed_edges.push_back(edge);
      delta.added_edges.push_back(std::move(updated));
    }
  }

  delta.context.strategy = Strategy::Deprecation;
  delta.context.title = "Deprecation: " + decision.candidate_id;
  delta.context.narrative = decision.reason + "\n" + decision.impact_summary +
                            "\nWorkaround: " + decision.workaround_hint;
  Json connections = Json::array();
  for (const auto& e : chosen->removed_edges) {
    connections.push_back(
        {{"connection", e.key().str()}, {"tools_affected", e.tools}});
  }
  Json data_points = Json::array();
  for (const auto& n : chosen->removed_nodes) data_points.push_back(n.id.str());
  delta.context.metadata = {{"candidate_id", chosen->candidate_id},
                            {"challenge_level", to_string(decision.challenge)},
                            {"reason", decision.reason},
                            {"workaround", decision.workaround_hint},
                            {"deprecated_tools", chosen->affected_tools},
                            {"removed_data_points", data_points},
                            {"removed_connections", connections}};

  EnvGraph next = apply_delta(graph, delta);
  auto report = validate(next);
  if (!report.ok()) {
    fail_proposal("deprecation", "result does not validate: " + report.summary());
  }
  return delta;
}

Episode run_episode(const EnvGraph& seed_graph, const std::vector<Strategy>& sequence,
                    Proposer& proposer, std::uint64_t seed,
                    const std::string& episode_id) {
  Episode ep;
  ep.episode_id = episode_id;
  ep.seed = seed;
  ep.base = seed_graph;
  ep.base.set_metadata("episode", episode_id);

  Rng rng(seed);
  EnvGraph current = ep.base;
  for (std::size_t k = 0; k < sequence.size(); ++k) {
    Strategy strategy = sequence[k];
    Rng step_rng = rng.fork(to_string(strategy), k);
    GraphDelta delta;
    switch (strategy) {
      case Strategy::Completion:
        delta = generate_completion(current, proposer, step_rng);
        break;
      case Strategy::Saturation:
        delta = generate_saturation(current, proposer, step_rng);
        break;
      case Strategy::Deprecation:
        delta = generate_deprecation(current, proposer, step_rng);
        break;
    }
    EnvGraph next = apply_delta(current, delta);
    next.set_metadata("episode", episode_id);
    auto report = validate(next);
    if (!report.ok()) {
      throw Error("episode " + episode_id + " step " + std::to_string(k + 1) +
                  " is invalid: " + report.summary());
    }
    ep.steps.push_back({std::move(delta), next});
    current = std::move(next);
  }
  return ep;
}

ValidationReport validate_evolution(const Episode& episode) {
  ValidationReport report;
  auto flag = [&](const std::string& code, const std::string& subject,
                  const std::string& message) {
    report.violations.push_back({code, subject, message});
  };

  for (std::size_t k = 0; k < episode.version_count(); ++k) {
    const EnvGraph& g = episode.version(k);
    for (auto v : validate(g).violations) {
      v.subject = g.version_id() + ": " + v.subject;
      report.violations.push_back(std::move(v));
    }
  }

  for (std::size_t k = 0; k < episode.steps.size(); ++k) {
    const EnvGraph& prev = episode.version(k);
    const EpisodeStep& step = episode.steps[k];
    const std::string& vid = step.graph.version_id();

    try {
      EnvGraph replayed = apply_delta(prev, step.delta);
      if (!isomorphic(replayed, step.graph)) {
        flag("chain mismatch", vid, "replaying the delta gives a different graph");
      }
    } catch (const ConflictError& e) {
      flag("delta inapplicable", vid, e.what());
      continue;
    }

    if (step.graph.version_id() != next_version_id(prev.version_id())) {
      flag("version id mismatch", vid,
           "expected " + next_version_id(prev.version_id()));
    }
    auto parent = step.graph.metadata().find("parent");
    if (parent == step.graph.metadata().end() || parent->second != prev.version_id()) {
      flag("parent mismatch", vid, "metadata parent is not " + prev.version_id());
    }
    if (step.delta.context.strategy != step.delta.strategy) {
      flag("strategy mismatch", vid, "context and delta disagree");
    }

    std::size_t prev_tools = prev.tool_count();
    std::size_t cur_tools = step.graph.tool_count();
    switch (step.delta.strategy) {
      case Strategy::Completion:
        if (cur_tools <= prev_tools) {
          flag("tool count not increased", vid, "completion must add tools");
        }
        if (step.graph.node_count() <= prev.node_count()) {
          flag("node count not increased", vid, "completion must add nodes");
        }
        break;
      case Strategy::Saturation:
        if (cur_tools <= prev_tools) {
          flag("tool count not increased", vid, "saturation must add tools");
        }
        if (step.graph.node_count() != prev.node_count()) {
          flag("node count changed", vid, "saturation must not touch nodes");
        }
        break;
      case Strategy::Deprecation:
        if (cur_tools >= prev_tools) {
          flag("tool count not decreased", vid, "deprecation must retire tools");
        }
        break;
    }

    // Context metadata must mirror the delta it annotates.
    const Json& meta = step.delta.context.metadata;
    auto names_of = [](const std::vector<ToolSpec>& tools) {
      std::set<std::string> s;
      for (const auto& t : tools) s.insert(t.name);
      return s;
    };
    auto listed = [&](const char* key) {
      std::set<std::string> s;
      if (meta.contains(key)) {
        for (const auto& v : meta[key]) s.insert(v.get<std::string>());
      }
      return s;
    };
    if (step.delta.strategy == Strategy::Deprecation) {
      if (listed("deprecated_tools") != names_of(step.delta.removed_tools)) {
        flag("context tool mismatch", vid,
             "deprecated_tools does not match removed tools");
      }
      std::set<std::string> readded;
      for (const auto& e : step.delta.added_edges) readded.insert(e.key().str());
      std::set<std::string> truly_removed;
      for (const auto& e : step.delta.removed_edges) {
        if (!readded.count(e.key().str())) truly_removed.insert(e.key().str());
      }
      std::set<std::string> connections;
      if (meta.contains("removed_connections")) {
        for (const auto& c : meta["removed_connections"]) {
          connections.insert(c["connection"].get<std::string>());
        }
      }
      if (connections != truly_removed) {
        flag("context edge mismatch", vid,
             "removed_connections does not match removed edges");
      }
      std::set<std::string> points;
      for (const auto& n : step.delta.removed_nodes) points.insert(n.id.str());
      if (listed("removed_data_points") != points) {
        flag("context node mismatch", vid,
             "removed_data_points does not match removed nodes");
      }
    } else {
      if (listed("new_tools") != names_of(step.delta.added_tools)) {
        flag("context tool mismatch", vid, "new_tools does not match added tools");
      }
    }
  }
  return report;
}

void write_episode(const Episode& episode, const std::filesystem::path& dir) {
  Json manifest;
  manifest["episode_id"] = episode.episode_id;
  manifest["seed"] = episode.seed;
  Json versions = Json::array();
  Json strategies = Json::array();
  for (std::size_t k = 0; k < episode.version_count(); ++k) {
    versions.push_back(episode.version(k).version_id());
  }
  for (const auto& step : episode.steps) {
    strategies.push_back(to_string(step.delta.strategy));
  }
  manifest["versions"] = versions;
  manifest["strategies"] = strategies;
  write_json_file(dir / "episode.json", manifest);

  for (std::size_t k = 0; k < episode.version_count(); ++k) {
    const EnvGraph& g = episode.version(k);
    write_graph_file(dir / (g.version_id() + ".json"), g);
  }
  for (std::size_t k = 0; k < episode.steps.size(); ++k) {
    const auto& step = episode.steps[k];
    std::string suffix = "_v" + std::to_string(k + 1) + ".json";
    write_json_file(dir / ("delta" + suffix), delta_to_json(step.delta));
    write_json_file(dir / ("context" + suffix), context_to_json(step.delta.context));
  }
}

Episode read_episode(const std::filesystem::path& dir) {
  Json manifest = read_json_file(dir / "episode.json");
  Episode ep;
  ep.episode_id = manifest.at("episode_id").get<std::string>();
  ep.seed = manifest.at("seed").get<std::uint64_t>();
  const Json& versions = manifest.at("versions");
  if (!versions.is_array() || versions.empty()) {
    throw ParseError("episode.json", "versions must be a non-empty array");
  }
  ep.base = read_graph_file(dir / (versions[0].get<std::string>() + ".json"));
  for (std::size_t k = 1; k < versions.size(); ++k) {
    EpisodeStep step;
    std::string suffix = "_v" + std::to_string(k) + ".json";
    step.delta = delta_from_json(read_json_file(dir / ("delta" + suffix)));
    // The context sidecar is the editable copy; it wins over the embedded one.
    step.delta.context =
        context_from_json(read_json_file(dir / ("context" + suffix)));
    step.graph = read_graph_file(dir / (versions[k].get<std::string>() + ".json"));
    ep.steps.push_back(std::move(step));
  }
  return ep;
}

}  // namespace evobench
