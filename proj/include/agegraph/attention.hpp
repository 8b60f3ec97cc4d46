#pragma once

#include <vector>

#include "agegraph/graph.hpp"
#include "agegraph/matrix.hpp"
#include "agegraph/tape.hpp"

namespace agegraph {

struct AttentionHeadParams {
    Matrix w_query;  // M_feat x d_k
    Matrix w_key;    // M_feat x d_k
};

struct RelationGraphSet {
    Matrix node_features;             // N x M_feat, shared across heads
    std::vector<Matrix> adjacencies;  // M dense N x N graphs
    std::vector<Matrix> scores;       // pre-combination attention rows, for audit
};

// S = row_softmax((X Wq)(X Wk)^T / sqrt(d_k)); output S * (a0 + I), or the
// Hadamard S .* (a0 + I) behind the ablation switch.
Matrix attention_adjacency(const Matrix& features, const Matrix& a0,
                           const AttentionHeadParams& head,
                           bool hadamard_combine = false,
                           Matrix* scores_out = nullptr);

RelationGraphSet generate_head_set(const FaceGraph& graph,
                                   const std::vector<AttentionHeadParams>& params,
                                   bool hadamard_combine = false);

// Tape route for gradient flow through Wq/Wk. a0bar must already hold a0 + I.
Tape::NodeId attention_adjacency_tape(Tape& tape, Tape::NodeId features,
                                      Tape::NodeId a0bar, Tape::NodeId wq,
                                      Tape::NodeId wk, bool hadamard_combine = false);

}  // namespace agegraph
