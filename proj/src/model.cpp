#include "agegraph/model.hpp"

#include <utility>

#include "agegraph/attention.hpp"
#include "agegraph/errors.hpp"
#include "agegraph/walk.hpp"

namespace agegraph {

namespace {

std::string head_key(std::size_t m, const char* leaf) {
    return "attn.h" + std::to_string(m) + "." + leaf;
}

// warm loss node plus the raw action-value row for the gradcheck tap
std::pair<Tape::NodeId, Tape::NodeId> warm_terms(Tape& tape, ParamStore& store,
                                                 const FaceGraph& enriched,
                                                 const PipelineConfig& cfg, int age,
                                                 GridPosition probe) {
    auto emb = embedding_tape(tape, store, enriched, cfg);
    QTapeOut q = q_forward_tape(tape, store, emb, probe);
    int group = encode_age(age).row;
    auto probs = tape.row_softmax(q.class_logits);
    auto p = tape.clamp_min(tape.pick(probs, 0, static_cast<std::size_t>(group)),
                            1e-12);
    auto one_minus = tape.clamp_min(tape.affine(p, 1.0, -1.0), 1e-12);
    auto focal = tape.scale(
        tape.hadamard(tape.pow_const(one_minus, cfg.rl.tau_focal), tape.log(p)), -1.0);
    auto reg = tape.abs(tape.sub(
        q.age, tape.constant(Matrix::filled(1, 1, static_cast<double>(age)))));
    auto warm =
        tape.add(tape.scale(focal, cfg.rl.eta), tape.scale(reg, 1.0 - cfg.rl.eta));
    return {warm, q.q};
}

}  // namespace

uint64_t sample_walk_seed(const std::string& id) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : id) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::size_t head_dim(const PipelineConfig& cfg, std::size_t feat_width) {
    if (cfg.dk > 0) return cfg.dk;
    std::size_t dk = feat_width / cfg.heads;
    return dk > 0 ? dk : 1;
}

FaceGraph enrich_sample_graph(const LabeledSample& sample, const PipelineConfig& cfg) {
    FaceGraph g = build_initial_graph(sample.node_features, cfg.graph_threshold);
    if (!cfg.walk_enabled) return g;
    WalkSet walks = sample_walks(g, cfg.walk, sample_walk_seed(sample.id));
    Matrix profiles = cooccurrence_profiles(walks, cfg.walk.window, g.node_count());
    return update_adjacency(g, profiles, cfg.walk_tau);
}

void init_model_params(ParamStore& store, const PipelineConfig& cfg,
                       std::size_t feat_width, Rng& rng) {
    if (cfg.attention_enabled) {
        std::size_t dk = head_dim(cfg, feat_width);
        for (std::size_t m = 0; m < cfg.heads; ++m) {
            store.add(head_key(m, "wq"), Matrix::glorot(feat_width, dk, rng));
            store.add(head_key(m, "wk"), Matrix::glorot(feat_width, dk, rng));
        }
    }
    init_stack_params(store, feat_width, cfg.stack, rng);
    QNetConfig qcfg = cfg.rl.qnet;
    qcfg.embed_dim = cfg.stack.width;
    init_qnet_params(store, qcfg, rng);
}

Matrix compute_embedding(const ParamStore& store, const FaceGraph& enriched,
                         const PipelineConfig& cfg) {
    RelationGraphSet rel;
    if (cfg.attention_enabled) {
        std::vector<AttentionHeadParams> heads;
        heads.reserve(cfg.heads);
        for (std::size_t m = 0; m < cfg.heads; ++m)
            heads.push_back(AttentionHeadParams{store.value(head_key(m, "wq")),
                                                store.value(head_key(m, "wk"))});
        rel = generate_head_set(enriched, heads, cfg.hadamard);
    } else {
        rel.node_features = enriched.node_features;
        rel.adjacencies.push_back(enriched.adjacency);
    }
    return forward_stack(rel, store, cfg.stack).graph_embedding;
}

Tape::NodeId embedding_tape(Tape& tape, ParamStore& store, const FaceGraph& enriched,
                            const PipelineConfig& cfg) {
    auto features = tape.constant(enriched.node_features);
    std::vector<Tape::NodeId> head_adjacencies;
    if (cfg.attention_enabled) {
        auto a0bar = tape.constant(
            add(enriched.adjacency, Matrix::identity(enriched.node_count())));
        for (std::size_t m = 0; m < cfg.heads; ++m)
            head_adjacencies.push_back(attention_adjacency_tape(
                tape, features, a0bar, tape.param(store, head_key(m, "wq")),
                tape.param(store, head_key(m, "wk")), cfg.hadamard));
    } else {
        head_adjacencies.push_back(tape.constant(enriched.adjacency));
    }
    return forward_stack_tape(tape, store, features, head_adjacencies, cfg.stack)
        .graph_embedding;
}

Tape::NodeId warm_loss_tape(Tape& tape, ParamStore& store, const FaceGraph& enriched,
                            const PipelineConfig& cfg, int age, GridPosition probe) {
    return warm_terms(tape, store, enriched, cfg, age, probe).first;
}

Tape::NodeId full_loss_tape(Tape& tape, ParamStore& store, const FaceGraph& enriched,
                            const PipelineConfig& cfg, int age, GridPosition probe) {
    auto [warm, qrow] = warm_terms(tape, store, enriched, cfg, age, probe);
    return tape.add(warm, tape.scale(tape.sum(qrow), 0.1));
}

}  // namespace agegraph
