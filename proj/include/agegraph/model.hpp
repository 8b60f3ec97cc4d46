#pragma once

#include <cstdint>
#include <string>

#include "agegraph/config.hpp"
#include "agegraph/gcn.hpp"
#include "agegraph/graph.hpp"
#include "agegraph/param_store.hpp"
#include "agegraph/rl.hpp"
#include "agegraph/rng.hpp"
#include "agegraph/tape.hpp"

namespace agegraph {

// FNV-1a of the sample id. Walks are seeded per sample from this so the
// enriched graph is a pure function of the record, not of training order.
uint64_t sample_walk_seed(const std::string& id);

// d_k for attention projections: the configured value, or feature width /
// head count (floored, at least 1) when the config leaves it at 0.
std::size_t head_dim(const PipelineConfig& cfg, std::size_t feat_width);

// Parameter-free front half: threshold graph, biased walks, profile-cosine
// enrichment. Results are cacheable across epochs.
FaceGraph enrich_sample_graph(const LabeledSample& sample, const PipelineConfig& cfg);

// Registers attention heads (attn.h<m>.wq/wk), the residual stack, and the
// q-network sized to the stack width.
void init_model_params(ParamStore& store, const PipelineConfig& cfg,
                       std::size_t feat_width, Rng& rng);

// Graph-level embedding (1 x width) through attention heads and the stack.
Matrix compute_embedding(const ParamStore& store, const FaceGraph& enriched,
                         const PipelineConfig& cfg);

// Tape twin of compute_embedding, gradients reach attention and stack.
Tape::NodeId embedding_tape(Tape& tape, ParamStore& store, const FaceGraph& enriched,
                            const PipelineConfig& cfg);

// Supervised warm-phase loss at a probe position: eta * focal on the group
// head + (1 - eta) * |age error| from the regression head.
Tape::NodeId warm_loss_tape(Tape& tape, ParamStore& store, const FaceGraph& enriched,
                            const PipelineConfig& cfg, int age, GridPosition probe);

// Warm loss plus a small tap on the action values so gradient checking
// covers every head.
Tape::NodeId full_loss_tape(Tape& tape, ParamStore& store, const FaceGraph& enriched,
                            const PipelineConfig& cfg, int age, GridPosition probe);

}  // namespace agegraph
