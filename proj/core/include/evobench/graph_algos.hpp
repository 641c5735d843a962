#pragma once

#include <set>
#include <vector>

#include "evobench/graph.hpp"
#include "evobench/rng.hpp"

namespace evobench {

/// Simple directed path from `start`: a target hop count is drawn uniformly
/// from [min_hops, max_hops], then each step picks uniformly among out-edges
/// whose target is unvisited. A walk that dead-ends past min_hops is returned
/// truncated; one that dead-ends earlier throws NoPathError, as does a start
/// node without out-edges. Returns the visited nodes, length hops + 1.
std::vector<NodeId> random_walk(const EnvGraph& graph, const NodeId& start,
                                int min_hops, int max_hops, Rng& rng);

/// Frontier hook for sample_connected_subgraph. The default keeps everything.
struct GrowthPolicy {
  virtual ~GrowthPolicy() = default;
  /// May drop frontier candidates; called before each uniform pick. Leaving
  /// `frontier` empty stops growth early.
  virtual void restrict_frontier(const EnvGraph& graph, const std::set<NodeId>& kept,
                                 std::vector<NodeId>& frontier) const {
    (void)graph;
    (void)kept;
    (void)frontier;
  }
};

/// Subgraph induced by `kept`: those nodes, every edge between two of them,
/// and every tool attached to a kept edge whose whole signature is inside
/// `kept`. Edge tool lists are filtered accordingly. Version id becomes
/// "<parent>_sub" with the parent recorded in metadata.
EnvGraph induce_subgraph(const EnvGraph& graph, const std::set<NodeId>& kept);

/// Induced subgraph grown from a uniformly chosen anchor by repeated uniform
/// frontier picks over undirected adjacency. Stops at target_node_count, or
/// earlier when the anchor's weakly connected component is exhausted. Kept
/// tools are those attached to a kept edge with every input/output node kept;
/// kept edges have their tool lists filtered accordingly.
EnvGraph sample_connected_subgraph(const EnvGraph& graph, int target_node_count,
                                   Rng& rng, const GrowthPolicy* policy = nullptr);

/// Fixed point of one-hop edge expansion plus tool transitions: a tool fires
/// once all its non-optional inputs are in the set, adding its outputs.
std::set<NodeId> reachable_set(const EnvGraph& graph, const std::set<NodeId>& seeds);

/// Undirected weakly-connected-components count helper.
int component_count(const EnvGraph& graph);

/// True when the subgraph induced by `kept` is weakly connected (empty and
/// singleton sets count as connected).
bool weakly_connected(const EnvGraph& graph, const std::set<NodeId>& kept);

/// Classical bridge detection (Tarjan lowlink) over the undirected view.
/// Returns edge keys whose removal increases the component count, sorted.
std::vector<EdgeKey> find_bridges(const EnvGraph& graph);

}  // namespace evobench
