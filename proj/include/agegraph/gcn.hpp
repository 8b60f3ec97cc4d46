#pragma once

#include <utility>
#include <vector>

#include "agegraph/attention.hpp"
#include "agegraph/matrix.hpp"
#include "agegraph/param_store.hpp"
#include "agegraph/rng.hpp"
#include "agegraph/tape.hpp"

namespace agegraph {

enum class StackMode { Full, Vanilla, ResGcn };

struct StackConfig {
    std::size_t depth = 12;  // L
    std::size_t width = 64;  // d
    double beta_min = 0.05;
    StackMode mode = StackMode::Full;
    double res_alpha = 0.5;  // fixed blend for the ResGcn baseline
};

struct StackOutput {
    std::vector<Matrix> head_embeddings;  // M of N x d
    Matrix fused_nodes;                   // N x d, head mean
    Matrix graph_embedding;               // 1 x d, node mean
    std::vector<std::vector<double>> alpha;      // [head][layer]
    std::vector<std::vector<double>> beta_mean;  // [head][layer]
    double node_variance = 0.0;
};

// D^{-1/2} (a + I) D^{-1/2}; self-loops make zero degrees impossible.
Matrix normalize_adjacency(const Matrix& a);

// ReLU(a_norm * h * w)
Matrix gcn_layer(const Matrix& h, const Matrix& a_norm, const Matrix& w);

// ReLU((1-alpha) * a_norm * h_l * w + alpha * h_prev)
Matrix res_gcn_layer(const Matrix& h_l, const Matrix& h_prev, const Matrix& a_norm,
                     const Matrix& w, double alpha);

// Per-node gate beta_i = clamp(sigmoid(gate_w . [h0_i || h_l_i] + gate_b), beta_min, 1);
// output row i = (1-beta_i) * (a_norm h_l)_i + beta_i * h0_i.
std::pair<Matrix, std::vector<double>> adaptive_initial_residual(
    const Matrix& h_l, const Matrix& h0, const Matrix& gate_w, double gate_b,
    const Matrix& a_norm, double beta_min);

// alpha = sigmoid(alpha_a + alpha_b * meanRowCosine(h_tilde_l, h_tilde_prev));
// output = ReLU((1-alpha) * a_norm * h_tilde_l * w + alpha * h_tilde_prev).
std::pair<Matrix, double> dynamic_developmental_layer(const Matrix& h_tilde_l,
                                                      const Matrix& h_tilde_prev,
                                                      const Matrix& w, double alpha_a,
                                                      double alpha_b,
                                                      const Matrix& a_norm);

// Registers stack parameters: stack.win/bin plus per layer stack.l<k>.w and,
// in Full mode, the beta/alpha gates. Gate biases start at zero.
void init_stack_params(ParamStore& store, std::size_t feat_width,
                       const StackConfig& cfg, Rng& rng);

// Shared input projection, then per head: depth gated layers (Full), plain
// graph-conv layers (Vanilla) or fixed-alpha residual layers (ResGcn). Heads
// share weights and differ only through their adjacency.
StackOutput forward_stack(const RelationGraphSet& rel, const ParamStore& store,
                          const StackConfig& cfg);

Tape::NodeId normalize_adjacency_tape(Tape& tape, Tape::NodeId a);

struct StackTapeOut {
    std::vector<Tape::NodeId> head_embeddings;
    Tape::NodeId fused_nodes;
    Tape::NodeId graph_embedding;
};

// Tape twin of forward_stack; head_adjacencies are un-normalized on-tape
// adjacency nodes (e.g. attention outputs) so gradients reach them.
StackTapeOut forward_stack_tape(Tape& tape, ParamStore& store, Tape::NodeId features,
                                const std::vector<Tape::NodeId>& head_adjacencies,
                                const StackConfig& cfg);

// Mean Euclidean distance over all unordered row pairs; the collapse metric
// for depth ablations.
double mean_pairwise_row_distance(const Matrix& m);

}  // namespace agegraph
