#pragma once

#include <cstdint>
#include <vector>

#include "agegraph/graph.hpp"
#include "agegraph/matrix.hpp"

namespace agegraph {

struct WalkConfig {
    double p = 1.0;  // return parameter
    double q = 1.0;  // in-out parameter
    std::size_t walks_per_node = 10;
    std::size_t walk_length = 20;
    std::size_t window = 4;
};

struct WalkSet {
    std::vector<std::vector<std::size_t>> walks;
};

// Shortest-path hops from src over a 0-1 adjacency, capped at max_depth;
// nodes beyond the cap report max_depth + 1.
std::vector<std::size_t> bfs_distances(const Matrix& adjacency, std::size_t src,
                                       std::size_t max_depth);

// Second-order bias: 1/p when next == prev, 1 when next neighbors prev,
// 1/q at distance two, 0 beyond.
double transition_weight(std::size_t prev, std::size_t next, const Matrix& adjacency,
                         const WalkConfig& config);

// walks_per_node walks from every node, each step drawn proportionally to
// transition_weight over the current node's neighbors. Isolated nodes yield
// single-node walks. Per-node rng streams keep the result independent of
// any outer sampling order.
WalkSet sample_walks(const FaceGraph& graph, const WalkConfig& config, uint64_t seed);

// Ordered within-window co-occurrence counts, symmetrized as C + C^T.
Matrix cooccurrence_profiles(const WalkSet& walks, std::size_t window,
                             std::size_t n_nodes);

// A'_ij = min(1, A_ij + [cos(profile_i, profile_j) >= tau and i != j]).
// Never removes an edge. Profile rows may have any width (the config can
// substitute raw node features for walk profiles).
Matrix update_adjacency(const Matrix& adjacency, const Matrix& profiles,
                        double tau = 0.824);
FaceGraph update_adjacency(const FaceGraph& graph, const Matrix& profiles,
                           double tau = 0.824);

}  // namespace agegraph
