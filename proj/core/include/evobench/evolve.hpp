#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "evobench/delta.hpp"
#include "evobench/graph.hpp"
#include "evobench/proposer.hpp"
#include "evobench/rng.hpp"

namespace evobench {

/// Hop bounds for saturation discovery walks.
struct WalkBounds {
  int min_hops = 2;
  int max_hops = 4;
};

/// Runs the proposer's completion decision through validation and packages
/// it as a delta. Throws ProposerError on any structural defect: missing or
/// duplicate databases, a database without exactly one primary key, dangling
/// edge or tool references, or a new subgraph not connected to the old one.
GraphDelta generate_completion(const EnvGraph& graph, Proposer& proposer, Rng& rng);

/// Discovers joinable walk paths, lets the proposer design shortcut tools
/// for them, and packages the result. The delta adds exactly
/// min(num_tools, discovered candidates) tools, each carrying its discovery
/// path, riding a links_to (single output) or aggregates (several outputs)
/// edge from its input to its last output. Throws NoCandidatesError when no
/// acceptable path exists.
GraphDelta generate_saturation(const EnvGraph& graph, Proposer& proposer, Rng& rng,
                               int num_tools = 2, WalkBounds bounds = {});

/// Enumerates deprecation opportunities in three classes:
///   peripheral_edge: an edge whose target has no other connection (the
///                    target node goes too, unless it is a primary key);
///   database:        a whole database, eligible when fewer than three other
///                    databases hold references into it;
///   bridge:          a cross-database edge whose removal disconnects the
///                    undirected graph.
/// affected_tools on each candidate is exactly the set of tools that
/// reference a removed node or ride a removed edge (a shortcut tool rides
/// every hop of its discovery path). Sorted by (kind, candidate_id); when
/// more than `max_candidates` exist a seeded subset is kept.
std::vector<DeprecationCandidate> sample_deprecation_candidates(
    const EnvGraph& graph, Rng& rng, std::size_t max_candidates = 64);

/// Lets the proposer pick one sampled candidate and packages the removal.
/// Surviving edges that listed a retired tool are rewritten (removed and
/// re-added with the name pruned); the context's removed_connections cover
/// only true removals. Throws NoCandidatesError when nothing can be
/// deprecated and ProposerError when the decision names no sampled
/// candidate.
GraphDelta generate_deprecation(const EnvGraph& graph, Proposer& proposer, Rng& rng);

/// One applied evolution step: the delta and the version it produced.
struct EpisodeStep {
  GraphDelta delta;
  EnvGraph graph;
};

/// A seed version plus a chain of applied steps, G0 through Gn.
struct Episode {
  std::string episode_id;
  std::uint64_t seed = 0;
  EnvGraph base;
  std::vector<EpisodeStep> steps;

  std::size_t version_count() const { return steps.size() + 1; }
  /// Version k, where 0 is the base.
  const EnvGraph& version(std::size_t k) const {
    return k == 0 ? base : steps[k - 1].graph;
  }
};

/// Applies `sequence` to the seed graph, one delta per strategy, all
/// randomness forked off `seed`. Every intermediate version must validate
/// cleanly; a violation is an Error, not a report.
Episode run_episode(const EnvGraph& seed_graph, const std::vector<Strategy>& sequence,
                    Proposer& proposer, std::uint64_t seed,
                    const std::string& episode_id);

/// Cross-version audit: per-version structural validity, delta/graph chain
/// agreement (replaying each delta must reproduce the stored version),
/// version-id and parent lineage, context/delta consistency, and per-strategy
/// tool-count monotonicity.
ValidationReport validate_evolution(const Episode& episode);

/// Episode directory layout: episode.json manifest, one <version_id>.json
/// per version, and delta_v<k>.json / context_v<k>.json per step (k >= 1).
void write_episode(const Episode& episode, const std::filesystem::path& dir);
Episode read_episode(const std::filesystem::path& dir);

}  // namespace evobench
