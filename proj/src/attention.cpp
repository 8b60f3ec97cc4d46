#include "agegraph/attention.hpp"

#include <cmath>

#include "agegraph/errors.hpp"

namespace agegraph {

Matrix attention_adjacency(const Matrix& features, const Matrix& a0,
                           const AttentionHeadParams& head, bool hadamard_combine,
                           Matrix* scores_out) {
    std::size_t n = features.rows();
    if (a0.rows() != n || a0.cols() != n)
        throw DimensionError("attention_adjacency: adjacency " + a0.shape_str() +
                             " does not match " + std::to_string(n) + " nodes");
    if (head.w_query.rows() != features.cols() || head.w_key.rows() != features.cols())
        throw DimensionError("attention_adjacency: head shapes " +
                             head.w_query.shape_str() + "/" + head.w_key.shape_str() +
                             " do not accept feature width " +
                             std::to_string(features.cols()));
    if (!head.w_query.same_shape(head.w_key))
        throw DimensionError("attention_adjacency: query/key shape mismatch");

    double dk = static_cast<double>(head.w_query.cols());
    Matrix queries = matmul(features, head.w_query);
    Matrix keys = matmul(features, head.w_key);
    Matrix s = row_softmax(scale(matmul_nt(queries, keys), 1.0 / std::sqrt(dk)));
    if (scores_out) *scores_out = s;

    Matrix a0bar = add(a0, Matrix::identity(n));
    return hadamard_combine ? hadamard(s, a0bar) : matmul(s, a0bar);
}

RelationGraphSet generate_head_set(const FaceGraph& graph,
                                   const std::vector<AttentionHeadParams>& params,
                                   bool hadamard_combine) {
    if (params.empty()) throw DomainError("generate_head_set: no heads configured");
    RelationGraphSet set;
    set.node_features = graph.node_features;
    set.adjacencies.reserve(params.size());
    set.scores.reserve(params.size());
    for (const auto& head : params) {
        Matrix scores;
        set.adjacencies.push_back(attention_adjacency(
            graph.node_features, graph.adjacency, head, hadamard_combine, &scores));
        set.scores.push_back(std::move(scores));
    }
    return set;
}

Tape::NodeId attention_adjacency_tape(Tape& tape, Tape::NodeId features,
                                      Tape::NodeId a0bar, Tape::NodeId wq,
                                      Tape::NodeId wk, bool hadamard_combine) {
    double dk = static_cast<double>(tape.value(wq).cols());
    auto queries = tape.matmul(features, wq);
    auto keys = tape.matmul(features, wk);
    auto s = tape.row_softmax(tape.scale(tape.matmul_nt(queries, keys), 1.0 / std::sqrt(dk)));
    return hadamard_combine ? tape.hadamard(s, a0bar) : tape.matmul(s, a0bar);
}

}  // namespace agegraph
