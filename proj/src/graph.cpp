#include "agegraph/graph.hpp"

#include <cmath>
#include <cstdio>

#include "agegraph/errors.hpp"

namespace agegraph {

std::vector<std::size_t> assign_patches(const std::vector<Keypoint>& keypoints,
                                        double width, double height,
                                        std::size_t patches_per_side) {
    if (patches_per_side < 1) throw DomainError("assign_patches: patches_per_side must be >= 1");
    if (width <= 0.0 || height <= 0.0)
        throw DomainError("assign_patches: image size must be positive");
    std::vector<std::size_t> out;
    out.reserve(keypoints.size());
    double cell_w = width / static_cast<double>(patches_per_side);
    double cell_h = height / static_cast<double>(patches_per_side);
    for (std::size_t k = 0; k < keypoints.size(); ++k) {
        const Keypoint& kp = keypoints[k];
        if (kp.x < 0.0 || kp.x >= width || kp.y < 0.0 || kp.y >= height) {
            char buf[128];
            std::snprintf(buf, sizeof(buf),
                          "assign_patches: keypoint %zu at (%g,%g) outside %gx%g", k,
                          kp.x, kp.y, width, height);
            throw DomainError(buf);
        }
        std::size_t px = static_cast<std::size_t>(std::floor(kp.x / cell_w));
        std::size_t py = static_cast<std::size_t>(std::floor(kp.y / cell_h));
        out.push_back(py * patches_per_side + px);
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> distinct_patches(
    const std::vector<std::size_t>& patch_ids) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t k = 0; k < patch_ids.size(); ++k) {
        bool seen = false;
        for (const auto& [patch, first] : out)
            if (patch == patch_ids[k]) {
                seen = true;
                break;
            }
        if (!seen) out.emplace_back(patch_ids[k], k);
    }
    return out;
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw DimensionError("cosine_similarity: lengths " + std::to_string(u.size()) +
                             " vs " + std::to_string(v.size()));
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    nu = std::sqrt(nu);
    nv = std::sqrt(nv);
    if (nu < 1e-12 || nv < 1e-12) return 0.0;
    return dot / (nu * nv);
}

FaceGraph build_initial_graph(const Matrix& node_features, double threshold) {
    if (node_features.rows() == 0 || node_features.cols() == 0)
        throw DomainError("build_initial_graph: empty feature matrix");
    if (threshold < -1.0 || threshold > 1.0)
        throw DomainError("build_initial_graph: threshold outside [-1,1]");
    std::size_t n = node_features.rows();
    FaceGraph g;
    g.node_features = node_features;
    g.adjacency = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double c = cosine_similarity(node_features.row(i), node_features.row(j));
            if (c >= threshold) {
                g.adjacency(i, j) = 1.0;
                g.adjacency(j, i) = 1.0;
            }
        }
    g.keypoint_index.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.keypoint_index[i] = i;
    return g;
}

}  // namespace agegraph
