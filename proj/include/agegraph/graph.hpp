#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agegraph/matrix.hpp"

namespace agegraph {

struct Keypoint {
    double x;
    double y;
};

// Nodes with features, a 0-1 adjacency, and bookkeeping. Edge features are
// carried for interface parity but consumed by nothing downstream.
struct FaceGraph {
    Matrix node_features;               // N x M_feat
    Matrix adjacency;                   // N x N, symmetric, zero diagonal
    std::optional<Matrix> edge_features;
    std::vector<std::size_t> keypoint_index;  // per-node source keypoint id

    std::size_t node_count() const { return adjacency.rows(); }
};

struct LabeledSample {
    std::string id;
    Matrix node_features;
    int age = 0;                  // clamped to [0, 99]
    std::optional<double> sigma;  // annotation std, when known

    int group() const { return age / 10; }
    int within() const { return age % 10; }
};

// Patch index = floor(y / (h/side)) * side + floor(x / (w/side)).
// Out-of-bounds keypoints are an error naming the offending coordinate.
std::vector<std::size_t> assign_patches(const std::vector<Keypoint>& keypoints,
                                        double width, double height,
                                        std::size_t patches_per_side);

// Distinct patch ids in first-occurrence order, paired with the index of the
// first keypoint that landed in each patch: one graph node per occupied patch.
std::vector<std::pair<std::size_t, std::size_t>> distinct_patches(
    const std::vector<std::size_t>& patch_ids);

// u.v / (|u||v|); either norm below 1e-12 gives 0 so the pipeline stays total.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

// A_ij = 1 iff i != j and cosine(x_i, x_j) >= threshold.
FaceGraph build_initial_graph(const Matrix& node_features, double threshold = 0.936);

}  // namespace agegraph
