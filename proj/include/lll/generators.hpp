// Instance generators: two structured families with closed-form event
// probabilities (cross-checked against the compiled tables in tests) and a
// seeded random family for fuzzing the engine.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lll/instance.hpp"

namespace lll {

// --- Hypergraph orientation -------------------------------------------------
//
// Input: a 3-uniform hypergraph where every node lies in delta hyperedges.
// Each hyperedge independently picks heads for 3 orientations uniformly from
// its 3 nodes (27-value variable, labels like "021"). A node goes bad when it
// is a sink (head of all its hyperedges) in at least 2 of the 3 orientations:
//   Pr = 3 q^2 (1 - q) + q^3,  q = 3^-delta.
LllInstance gen_hypergraph_orientation(
    int node_count, const std::vector<std::array<int, 3>>& hyperedges,
    std::uint64_t seed);

Rat orientation_event_prob(int delta);

// Ring topology {i, i+1, i+3} mod n (n >= 7): 3-regular, dependency degree 6.
std::vector<std::array<int, 3>> cyclic_triple_system(int node_count);

// Ring plus one extra hyperedge {0, 2, 4} (n >= 9): pushes two nodes to
// degree 4 and the dependency degree to 7.
std::vector<std::array<int, 3>> cyclic_triple_system_dense(int node_count);

// --- Relaxed weak splitting -------------------------------------------------
//
// Random bipartite graph: v_count left nodes each pick v_degree distinct
// right nodes, each right node used by at most 3 left nodes. Right nodes hold
// a uniform color from [colors]; a left node goes bad when it sees fewer than
// `coverage` distinct colors. For coverage 2: Pr = colors^(1 - v_degree).
LllInstance gen_weak_splitting_relaxed(int v_count, int u_count, int v_degree,
                                       int colors, int coverage,
                                       std::uint64_t seed);

Rat weak_splitting_event_prob(int colors, int v_degree);

// --- Seeded random instances ------------------------------------------------
//
// Random variables (rank <= 3) and random truth tables, greedily pruned
// (largest-probability rows first) until every event satisfies the criterion
// for the instance's dependency degree. Same seed, same instance, bit for bit.
LllInstance gen_random_rank3(int n_events, int d_max, int domain_size,
                             std::uint64_t seed);

// Pure rank-2 variant: every variable affects exactly two events.
LllInstance gen_random_rank2(int n_events, int d_max, int domain_size,
                             std::uint64_t seed);

}  // namespace lll
