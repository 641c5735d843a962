#pragma once

#include "evobench/graph.hpp"
#include "evobench/rng.hpp"

namespace evobench {

enum class SeedScale : std::uint8_t {
  Desk,   // 8 databases, ~40 nodes, ~15 tools
  Paper,  // 12 databases, 64 nodes, 51 tools
};

/// Deterministic synthetic e-commerce environment, version "G0". The Cart
/// subsystem is wired so that retiring the whole database removes exactly
/// 5 nodes, 7 edges, and 5 tools; Cart.created_at / Cart.updated_at carry no
/// edges on purpose.
EnvGraph build_seed_graph(SeedScale scale);

/// Base entity pool for the seed environment: users and products, keyed by
/// database name. Desk scale: 10 users, 50 products; paper scale: 50 users,
/// 1000 products. Everything derives from `seed`.
Json build_seed_store(SeedScale scale, std::uint64_t seed);

/// Shared synthetic-identity helpers, used by both the seed store and task
/// prerequisites so generated people and products look alike everywhere.
Json synthetic_user(int index);
Json synthetic_product(int index, Rng& rng);

}  // namespace evobench
