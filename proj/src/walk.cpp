#include "agegraph/walk.hpp"

#include <deque>

#include "agegraph/errors.hpp"
#include "agegraph/rng.hpp"

namespace agegraph {

namespace {

void validate(const WalkConfig& c) {
    if (c.p <= 0.0 || c.q <= 0.0) throw DomainError("walk: p and q must be positive");
    if (c.walk_length < 2) throw DomainError("walk: walk_length must be >= 2");
    if (c.window < 1) throw DomainError("walk: window must be >= 1");
}

std::vector<std::size_t> neighbors_of(const Matrix& a, std::size_t node) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < a.cols(); ++j)
        if (a(node, j) != 0.0) out.push_back(j);
    return out;
}

}  // namespace

std::vector<std::size_t> bfs_distances(const Matrix& adjacency, std::size_t src,
                                       std::size_t max_depth) {
    std::size_t n = adjacency.rows();
    if (src >= n) throw DomainError("bfs_distances: source node out of range");
    std::vector<std::size_t> dist(n, max_depth + 1);
    std::deque<std::size_t> frontier;
    dist[src] = 0;
    frontier.push_back(src);
    while (!frontier.empty()) {
        std::size_t u = frontier.front();
        frontier.pop_front();
        if (dist[u] >= max_depth) continue;
        for (std::size_t v = 0; v < n; ++v)
            if (adjacency(u, v) != 0.0 && dist[v] > dist[u] + 1) {
                dist[v] = dist[u] + 1;
                frontier.push_back(v);
            }
    }
    return dist;
}

double transition_weight(std::size_t prev, std::size_t next, const Matrix& adjacency,
                         const WalkConfig& config) {
    validate(config);
    std::size_t n = adjacency.rows();
    if (prev >= n || next >= n) throw DomainError("transition_weight: node out of range");
    auto dist = bfs_distances(adjacency, prev, 2);
    switch (dist[next]) {
        case 0: return 1.0 / config.p;
        case 1: return 1.0;
        case 2: return 1.0 / config.q;
        default: return 0.0;
    }
}

WalkSet sample_walks(const FaceGraph& graph, const WalkConfig& config, uint64_t seed) {
    validate(config);
    const Matrix& a = graph.adjacency;
    std::size_t n = a.rows();
    if (n == 0) throw DomainError("sample_walks: empty graph");

    WalkSet set;
    set.walks.reserve(n * config.walks_per_node);
    for (std::size_t start = 0; start < n; ++start) {
        Rng rng(Rng::mix(seed, start));
        auto start_nbrs = neighbors_of(a, start);
        for (std::size_t w = 0; w < config.walks_per_node; ++w) {
            std::vector<std::size_t> walk{start};
            if (!start_nbrs.empty()) {
                walk.push_back(start_nbrs[rng.uniform_int(start_nbrs.size())]);
                while (walk.size() < config.walk_length) {
                    std::size_t cur = walk[walk.size() - 1];
                    std::size_t prev = walk[walk.size() - 2];
                    auto nbrs = neighbors_of(a, cur);
                    if (nbrs.empty()) break;
                    auto dist = bfs_distances(a, prev, 2);
                    std::vector<double> weights(nbrs.size());
                    double total = 0.0;
                    for (std::size_t k = 0; k < nbrs.size(); ++k) {
                        double wgt = 0.0;
                        switch (dist[nbrs[k]]) {
                            case 0: wgt = 1.0 / config.p; break;
                            case 1: wgt = 1.0; break;
                            case 2: wgt = 1.0 / config.q; break;
                            default: wgt = 0.0; break;
                        }
                        weights[k] = wgt;
                        total += wgt;
                    }
                    if (total <= 0.0) break;
                    double u = rng.uniform() * total;
                    double acc = 0.0;
                    std::size_t chosen = nbrs.size() - 1;
                    for (std::size_t k = 0; k < nbrs.size(); ++k) {
                        acc += weights[k];
                        if (u < acc) {
                            chosen = k;
                            break;
                        }
                    }
                    walk.push_back(nbrs[chosen]);
                }
            }
            set.walks.push_back(std::move(walk));
        }
    }
    return set;
}

Matrix cooccurrence_profiles(const WalkSet& walks, std::size_t window,
                             std::size_t n_nodes) {
    if (window < 1) throw DomainError("cooccurrence_profiles: window must be >= 1");
    Matrix c(n_nodes, n_nodes);
    for (const auto& walk : walks.walks)
        for (std::size_t t = 0; t < walk.size(); ++t) {
            if (walk[t] >= n_nodes)
                throw DomainError("cooccurrence_profiles: node id beyond n_nodes");
            for (std::size_t d = 1; d <= window && t + d < walk.size(); ++d)
                c(walk[t], walk[t + d]) += 1.0;
        }
    return add(c, transpose(c));
}

Matrix update_adjacency(const Matrix& adjacency, const Matrix& profiles, double tau) {
    std::size_t n = adjacency.rows();
    if (adjacency.cols() != n)
        throw DimensionError("update_adjacency: adjacency not square: " +
                             adjacency.shape_str());
    if (profiles.rows() != n)
        throw DimensionError("update_adjacency: profiles rows " +
                             std::to_string(profiles.rows()) + " != node count " +
                             std::to_string(n));
    Matrix out = adjacency;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (cosine_similarity(profiles.row(i), profiles.row(j)) >= tau) {
                out(i, j) = 1.0;
                out(j, i) = 1.0;
            }
            if (out(i, j) > 1.0) out(i, j) = 1.0;
            if (out(j, i) > 1.0) out(j, i) = 1.0;
        }
    return out;
}

FaceGraph update_adjacency(const FaceGraph& graph, const Matrix& profiles, double tau) {
    FaceGraph out = graph;
    out.adjacency = update_adjacency(graph.adjacency, profiles, tau);
    return out;
}

}  // namespace agegraph
