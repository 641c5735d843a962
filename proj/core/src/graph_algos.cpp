#include "evobench/graph_algos.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "evobench/errors.hpp"

namespace evobench {

std::vector<NodeId> random_walk(const EnvGraph& graph, const NodeId& start,
                                int min_hops, int max_hops, Rng& rng) {
  if (!graph.has_node(start)) throw NoPathError("walk start missing: " + start.str());
  if (graph.out_edges(start).empty()) {
    throw NoPathError("no outgoing edge from " + start.str());
  }
  int target = rng.range(min_hops, max_hops);
  std::vector<NodeId> path{start};
  std::set<NodeId> visited{start};
  while (static_cast<int>(path.size()) - 1 < target) {
    std::vector<NodeId> options;
    for (const auto* edge : graph.out_edges(path.back())) {
      if (!visited.count(edge->target)) options.push_back(edge->target);
    }
    if (options.empty()) {
      if (static_cast<int>(path.size()) - 1 >= min_hops) return path;
      throw NoPathError("walk stuck at " + path.back().str() + " before " +
                        std::to_string(min_hops) + " hops");
    }
    NodeId pick = options[static_cast<std::size_t>(rng.uniform(options.size()))];
    visited.insert(pick);
    path.push_back(std::move(pick));
  }
  return path;
}

namespace {

std::map<NodeId, std::vector<NodeId>> undirected_adjacency(const EnvGraph& graph) {
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const auto& [id, _] : graph.nodes()) adj[id];
  for (const auto& [key, _] : graph.edges()) {
    adj[key.source].push_back(key.target);
    adj[key.target].push_back(key.source);
  }
  return adj;
}

}  // namespace

EnvGraph induce_subgraph(const EnvGraph& graph, const std::set<NodeId>& kept) {
  EnvGraph sub;
  sub.set_version_id(graph.version_id() + "_sub");
  sub.set_metadata("parent", graph.version_id());
  for (const auto& id : kept) sub.add_node(*graph.find_node(id));

  // A tool survives when some kept edge carries it and its whole signature
  // is inside the kept node set.
  std::set<std::string> kept_tools;
  std::vector<RelationEdge> kept_edges;
  for (const auto& [key, edge] : graph.edges()) {
    if (!kept.count(key.source) || !kept.count(key.target)) continue;
    kept_edges.push_back(edge);
    for (const auto& name : edge.tools) {
      const auto* tool = graph.find_tool(name);
      if (!tool) continue;
      bool whole = true;
      for (const auto& id : tool->inputs) {
        if (!kept.count(id)) { whole = false; break; }
      }
      if (whole) {
        for (const auto& id : tool->outputs) {
          if (!kept.count(id)) { whole = false; break; }
        }
      }
      if (whole) kept_tools.insert(name);
    }
  }
  for (const auto& name : kept_tools) sub.add_tool(*graph.find_tool(name));
  for (auto& edge : kept_edges) {
    std::vector<std::string> tools;
    for (const auto& name : edge.tools) {
      if (kept_tools.count(name)) tools.push_back(name);
    }
    edge.tools = std::move(tools);
    sub.add_edge(std::move(edge));
  }
  return sub;
}

EnvGraph sample_connected_subgraph(const EnvGraph& graph, int target_node_count,
                                   Rng& rng, const GrowthPolicy* policy) {
  if (graph.nodes().empty()) throw PreconditionError("cannot sample from empty graph");
  std::vector<NodeId> all;
  for (const auto& [id, _] : graph.nodes()) all.push_back(id);
  NodeId anchor = all[static_cast<std::size_t>(rng.uniform(all.size()))];

  auto adj = undirected_adjacency(graph);
  std::set<NodeId> kept{anchor};
  while (static_cast<int>(kept.size()) < target_node_count) {
    std::set<NodeId> frontier_set;
    for (const auto& id : kept) {
      for (const auto& n : adj[id]) {
        if (!kept.count(n)) frontier_set.insert(n);
      }
    }
    std::vector<NodeId> frontier(frontier_set.begin(), frontier_set.end());
    if (policy) policy->restrict_frontier(graph, kept, frontier);
    if (frontier.empty()) break;  // component (or policy) exhausted
    kept.insert(frontier[static_cast<std::size_t>(rng.uniform(frontier.size()))]);
  }
  return induce_subgraph(graph, kept);
}

std::set<NodeId> reachable_set(const EnvGraph& graph, const std::set<NodeId>& seeds) {
  std::set<NodeId> reached;
  for (const auto& id : seeds) {
    if (graph.has_node(id)) reached.insert(id);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [key, _] : graph.edges()) {
      if (reached.count(key.source) && !reached.count(key.target)) {
        reached.insert(key.target);
        changed = true;
      }
    }
    for (const auto& [name, tool] : graph.tools()) {
      bool ready = true;
      for (const auto& in : tool.inputs) {
        if (!tool.is_optional_input(in) && !reached.count(in)) { ready = false; break; }
      }
      if (!ready) continue;
      for (const auto& out : tool.outputs) {
        if (!reached.count(out)) {
          reached.insert(out);
          changed = true;
        }
      }
    }
  }
  return reached;
}

int component_count(const EnvGraph& graph) {
  auto adj = undirected_adjacency(graph);
  std::set<NodeId> seen;
  int components = 0;
  for (const auto& [id, _] : graph.nodes()) {
    if (seen.count(id)) continue;
    ++components;
    std::vector<NodeId> stack{id};
    seen.insert(id);
    while (!stack.empty()) {
      NodeId cur = stack.back();
      stack.pop_back();
      for (const auto& n : adj[cur]) {
        if (seen.insert(n).second) stack.push_back(n);
      }
    }
  }
  return components;
}

bool weakly_connected(const EnvGraph& graph, const std::set<NodeId>& kept) {
  if (kept.size() <= 1) return true;
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const auto& [key, _] : graph.edges()) {
    if (kept.count(key.source) && kept.count(key.target)) {
      adj[key.source].push_back(key.target);
      adj[key.target].push_back(key.source);
    }
  }
  std::set<NodeId> seen{*kept.begin()};
  std::vector<NodeId> stack{*kept.begin()};
  while (!stack.empty()) {
    NodeId cur = stack.back();
    stack.pop_back();
    for (const auto& n : adj[cur]) {
      if (seen.insert(n).second) stack.push_back(n);
    }
  }
  return seen.size() == kept.size();
}

std::vector<EdgeKey> find_bridges(const EnvGraph& graph) {
  // Undirected multigraph view: parallel edges between the same node pair
  // mean neither is a bridge, so track multiplicity per unordered pair.
  struct Arc {
    NodeId to;
    std::pair<NodeId, NodeId> pair_key;
  };
  std::map<std::pair<NodeId, NodeId>, int> multiplicity;
  std::map<std::pair<NodeId, NodeId>, std::vector<EdgeKey>> pair_edges;
  auto norm = [](const NodeId& a, const NodeId& b) {
    return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
  };
  std::map<NodeId, std::vector<Arc>> adj;
  for (const auto& [id, _] : graph.nodes()) adj[id];
  for (const auto& [key, _] : graph.edges()) {
    if (key.source == key.target) continue;
    auto pk = norm(key.source, key.target);
    multiplicity[pk]++;
    pair_edges[pk].push_back(key);
  }
  for (const auto& [pk, _] : multiplicity) {
    adj[pk.first].push_back({pk.second, pk});
    adj[pk.second].push_back({pk.first, pk});
  }

  std::map<NodeId, int> disc, low;
  std::set<std::pair<NodeId, NodeId>> bridge_pairs;
  int timer = 0;

  // Iterative DFS; (node, parent pair edge) frames.
  struct Frame {
    NodeId node;
    std::pair<NodeId, NodeId> via;
    bool has_via;
    std::size_t next = 0;
  };
  for (const auto& [root, _] : adj) {
    if (disc.count(root)) continue;
    std::vector<Frame> stack;
    stack.push_back({root, {}, false});
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& arcs = adj[f.node];
      if (f.next < arcs.size()) {
        const Arc& arc = arcs[f.next++];
        if (f.has_via && arc.pair_key == f.via) continue;
        if (!disc.count(arc.to)) {
          disc[arc.to] = low[arc.to] = timer++;
          stack.push_back({arc.to, arc.pair_key, true});
        } else {
          low[f.node] = std::min(low[f.node], disc[arc.to]);
        }
      } else {
        Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          Frame& parent = stack.back();
          low[parent.node] = std::min(low[parent.node], low[done.node]);
          if (low[done.node] > disc[parent.node] && multiplicity[done.via] == 1) {
            bridge_pairs.insert(done.via);
          }
        }
      }
    }
  }

  std::vector<EdgeKey> out;
  for (const auto& pk : bridge_pairs) {
    for (const auto& key : pair_edges[pk]) out.push_back(key);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace evobench
