#include "agegraph/gcn.hpp"

#include <cmath>
#include <string>

#include "agegraph/errors.hpp"

namespace agegraph {

namespace {

std::string layer_key(std::size_t l, const char* leaf) {
    return "stack.l" + std::to_string(l) + "." + leaf;
}

double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double mean_row_cosine_plain(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b))
        throw DimensionError("mean row cosine: shape mismatch " + a.shape_str() +
                             " vs " + b.shape_str());
    double total = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            dot += a(i, j) * b(i, j);
            na += a(i, j) * a(i, j);
            nb += b(i, j) * b(i, j);
        }
        na = std::sqrt(na);
        nb = std::sqrt(nb);
        if (na > 1e-12 && nb > 1e-12) total += dot / (na * nb);
    }
    return a.rows() == 0 ? 0.0 : total / static_cast<double>(a.rows());
}

Matrix relu_plain(Matrix m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j) < 0.0) m(i, j) = 0.0;
    return m;
}

}  // namespace

Matrix normalize_adjacency(const Matrix& a) {
    std::size_t n = a.rows();
    if (a.cols() != n)
        throw DimensionError("normalize_adjacency: not square: " + a.shape_str());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (a(i, j) < 0.0)
                throw DomainError("normalize_adjacency: negative entry at (" +
                                  std::to_string(i) + "," + std::to_string(j) + ")");
    Matrix abar = add(a, Matrix::identity(n));
    std::vector<double> dinv(n);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0.0;
        for (std::size_t j = 0; j < n; ++j) deg += abar(i, j);
        dinv[i] = 1.0 / std::sqrt(deg);
    }
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = abar(i, j) * dinv[i] * dinv[j];
    out.ensure_finite("normalize_adjacency");
    return out;
}

Matrix gcn_layer(const Matrix& h, const Matrix& a_norm, const Matrix& w) {
    return relu_plain(matmul(matmul(a_norm, h), w));
}

Matrix res_gcn_layer(const Matrix& h_l, const Matrix& h_prev, const Matrix& a_norm,
                     const Matrix& w, double alpha) {
    if (alpha < 0.0 || alpha > 1.0)
        throw DomainError("res_gcn_layer: alpha outside [0,1]");
    Matrix prop = scale(matmul(matmul(a_norm, h_l), w), 1.0 - alpha);
    return relu_plain(add(prop, scale(h_prev, alpha)));
}

std::pair<Matrix, std::vector<double>> adaptive_initial_residual(
    const Matrix& h_l, const Matrix& h0, const Matrix& gate_w, double gate_b,
    const Matrix& a_norm, double beta_min) {
    if (!h_l.same_shape(h0))
        throw DimensionError("adaptive_initial_residual: state shapes " +
                             h_l.shape_str() + " vs " + h0.shape_str());
    std::size_t d = h_l.cols();
    if (gate_w.rows() != 2 * d || gate_w.cols() != 1)
        throw DimensionError("adaptive_initial_residual: gate expects " +
                             std::to_string(2 * d) + "x1, got " + gate_w.shape_str());
    Matrix prop = matmul(a_norm, h_l);
    Matrix out(h_l.rows(), d);
    std::vector<double> beta(h_l.rows());
    for (std::size_t i = 0; i < h_l.rows(); ++i) {
        double z = gate_b;
        for (std::size_t k = 0; k < d; ++k) z += gate_w(k, 0) * h0(i, k);
        for (std::size_t k = 0; k < d; ++k) z += gate_w(d + k, 0) * h_l(i, k);
        double b = sigmoid(z);
        if (b < beta_min) b = beta_min;
        if (b > 1.0) b = 1.0;
        beta[i] = b;
        for (std::size_t k = 0; k < d; ++k)
            out(i, k) = (1.0 - b) * prop(i, k) + b * h0(i, k);
    }
    out.ensure_finite("adaptive_initial_residual");
    return {std::move(out), std::move(beta)};
}

std::pair<Matrix, double> dynamic_developmental_layer(const Matrix& h_tilde_l,
                                                      const Matrix& h_tilde_prev,
                                                      const Matrix& w, double alpha_a,
                                                      double alpha_b,
                                                      const Matrix& a_norm) {
    double cbar = mean_row_cosine_plain(h_tilde_l, h_tilde_prev);
    double alpha = sigmoid(alpha_a + alpha_b * cbar);
    Matrix prop = scale(matmul(matmul(a_norm, h_tilde_l), w), 1.0 - alpha);
    Matrix out = relu_plain(add(prop, scale(h_tilde_prev, alpha)));
    return {std::move(out), alpha};
}

void init_stack_params(ParamStore& store, std::size_t feat_width,
                       const StackConfig& cfg, Rng& rng) {
    if (cfg.depth < 1) throw DomainError("stack: depth must be >= 1");
    if (cfg.width < 1) throw DomainError("stack: width must be >= 1");
    std::size_t d = cfg.width;
    store.add("stack.win", Matrix::glorot(feat_width, d, rng));
    store.add("stack.bin", Matrix(1, d));
    for (std::size_t l = 0; l < cfg.depth; ++l) {
        store.add(layer_key(l, "w"), Matrix::glorot(d, d, rng));
        if (cfg.mode == StackMode::Full) {
            store.add(layer_key(l, "gate_w"), Matrix::glorot(2 * d, 1, rng));
            store.add(layer_key(l, "gate_b"), Matrix(1, 1));
            store.add(layer_key(l, "alpha_a"), Matrix(1, 1));
            store.add(layer_key(l, "alpha_b"), Matrix(1, 1));
        }
    }
}

StackOutput forward_stack(const RelationGraphSet& rel, const ParamStore& store,
                          const StackConfig& cfg) {
    if (rel.adjacencies.empty()) throw DomainError("forward_stack: no relation graphs");
    const Matrix& x = rel.node_features;
    Matrix h0 = matmul(x, store.value("stack.win"));
    {
        const Matrix& bin = store.value("stack.bin");
        for (std::size_t i = 0; i < h0.rows(); ++i)
            for (std::size_t j = 0; j < h0.cols(); ++j) h0(i, j) += bin(0, j);
    }

    StackOutput out;
    for (const Matrix& adj : rel.adjacencies) {
        Matrix a_norm = normalize_adjacency(adj);
        std::vector<double> alphas, betas;
        Matrix h = h0;
        if (cfg.mode == StackMode::Vanilla) {
            for (std::size_t l = 0; l < cfg.depth; ++l)
                h = gcn_layer(h, a_norm, store.value(layer_key(l, "w")));
        } else if (cfg.mode == StackMode::ResGcn) {
            Matrix prev = h0;
            for (std::size_t l = 0; l < cfg.depth; ++l) {
                Matrix next = res_gcn_layer(h, prev, a_norm,
                                            store.value(layer_key(l, "w")),
                                            cfg.res_alpha);
                prev = std::move(h);
                h = std::move(next);
                alphas.push_back(cfg.res_alpha);
            }
        } else {
            Matrix ht_cur = h0;   // running H-tilde at layer l
            Matrix ht_prev = h0;  // H-tilde at layer l-1
            for (std::size_t l = 0; l < cfg.depth; ++l) {
                auto [ht_next, beta] = adaptive_initial_residual(
                    h, h0, store.value(layer_key(l, "gate_w")),
                    store.value(layer_key(l, "gate_b"))(0, 0), a_norm, cfg.beta_min);
                auto [h_next, alpha] = dynamic_developmental_layer(
                    ht_cur, ht_prev, store.value(layer_key(l, "w")),
                    store.value(layer_key(l, "alpha_a"))(0, 0),
                    store.value(layer_key(l, "alpha_b"))(0, 0), a_norm);
                double bsum = 0.0;
                for (double b : beta) bsum += b;
                betas.push_back(bsum / static_cast<double>(beta.size()));
                alphas.push_back(alpha);
                h = std::move(h_next);
                ht_prev = std::move(ht_cur);
                ht_cur = std::move(ht_next);
            }
        }
        out.alpha.push_back(std::move(alphas));
        out.beta_mean.push_back(std::move(betas));
        out.head_embeddings.push_back(std::move(h));
    }

    Matrix fused = out.head_embeddings[0];
    for (std::size_t m = 1; m < out.head_embeddings.size(); ++m)
        fused = add(fused, out.head_embeddings[m]);
    fused = scale(fused, 1.0 / static_cast<double>(out.head_embeddings.size()));
    out.fused_nodes = fused;

    Matrix graph(1, fused.cols());
    for (std::size_t j = 0; j < fused.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < fused.rows(); ++i) s += fused(i, j);
        graph(0, j) = s / static_cast<double>(fused.rows());
    }
    out.graph_embedding = graph;

    double var = 0.0;
    for (std::size_t j = 0; j < fused.cols(); ++j) {
        double mean = graph(0, j);
        for (std::size_t i = 0; i < fused.rows(); ++i) {
            double dvt = fused(i, j) - mean;
            var += dvt * dvt;
        }
    }
    out.node_variance = var / static_cast<double>(fused.rows() * fused.cols());
    return out;
}

Tape::NodeId normalize_adjacency_tape(Tape& tape, Tape::NodeId a) {
    std::size_t n = tape.value(a).rows();
    auto abar = tape.add(a, tape.constant(Matrix::identity(n)));
    auto dinv = tape.pow_const(tape.row_sums(abar), -0.5);
    return tape.scale_rows(tape.scale_cols(abar, dinv), dinv);
}

StackTapeOut forward_stack_tape(Tape& tape, ParamStore& store, Tape::NodeId features,
                                const std::vector<Tape::NodeId>& head_adjacencies,
                                const StackConfig& cfg) {
    if (head_adjacencies.empty())
        throw DomainError("forward_stack_tape: no relation graphs");
    auto h0 = tape.add_row_broadcast(tape.matmul(features, tape.param(store, "stack.win")),
                                     tape.param(store, "stack.bin"));
    std::size_t n = tape.value(h0).rows();
    auto ones_col = tape.constant(Matrix::filled(n, 1, 1.0));

    StackTapeOut out;
    for (auto adj : head_adjacencies) {
        auto a_norm = normalize_adjacency_tape(tape, adj);
        auto h = h0;
        if (cfg.mode == StackMode::Vanilla) {
            for (std::size_t l = 0; l < cfg.depth; ++l)
                h = tape.relu(tape.matmul(tape.matmul(a_norm, h),
                                          tape.param(store, layer_key(l, "w"))));
        } else if (cfg.mode == StackMode::ResGcn) {
            auto prev = h0;
            for (std::size_t l = 0; l < cfg.depth; ++l) {
                auto prop = tape.scale(
                    tape.matmul(tape.matmul(a_norm, h),
                                tape.param(store, layer_key(l, "w"))),
                    1.0 - cfg.res_alpha);
                auto next = tape.relu(tape.add(prop, tape.scale(prev, cfg.res_alpha)));
                prev = h;
                h = next;
            }
        } else {
            auto ht_cur = h0;
            auto ht_prev = h0;
            for (std::size_t l = 0; l < cfg.depth; ++l) {
                // adaptive initial residual from H^(l)
                auto gate_in = tape.concat_cols(h0, h);
                auto logits = tape.add_row_broadcast(
                    tape.matmul(gate_in, tape.param(store, layer_key(l, "gate_w"))),
                    tape.param(store, layer_key(l, "gate_b")));
                auto beta = tape.clamp_min(tape.sigmoid(logits), cfg.beta_min);
                auto one_minus_beta = tape.affine(beta, 1.0, -1.0);
                auto prop = tape.matmul(a_norm, h);
                auto ht_next = tape.add(tape.scale_rows(prop, one_minus_beta),
                                        tape.scale_rows(h0, beta));
                // developmental layer from H-tilde^(l), H-tilde^(l-1)
                auto cbar = tape.mean_row_cosine(ht_cur, ht_prev);
                auto alpha = tape.sigmoid(
                    tape.add(tape.param(store, layer_key(l, "alpha_a")),
                             tape.hadamard(tape.param(store, layer_key(l, "alpha_b")),
                                           cbar)));
                auto alpha_col = tape.matmul(ones_col, alpha);
                auto dev = tape.matmul(tape.matmul(a_norm, ht_cur),
                                       tape.param(store, layer_key(l, "w")));
                auto h_next = tape.relu(
                    tape.add(tape.scale_rows(dev, tape.affine(alpha_col, 1.0, -1.0)),
                             tape.scale_rows(ht_prev, alpha_col)));
                h = h_next;
                ht_prev = ht_cur;
                ht_cur = ht_next;
            }
        }
        out.head_embeddings.push_back(h);
    }

    auto fused = out.head_embeddings[0];
    for (std::size_t m = 1; m < out.head_embeddings.size(); ++m)
        fused = tape.add(fused, out.head_embeddings[m]);
    fused = tape.scale(fused, 1.0 / static_cast<double>(out.head_embeddings.size()));
    out.fused_nodes = fused;
    out.graph_embedding = tape.mean_over_rows(fused);
    return out;
}

double mean_pairwise_row_distance(const Matrix& m) {
    if (m.rows() < 2) return 0.0;
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.rows(); ++j) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < m.cols(); ++k) {
                double dlt = m(i, k) - m(j, k);
                d2 += dlt * dlt;
            }
            total += std::sqrt(d2);
            ++pairs;
        }
    return total / static_cast<double>(pairs);
}

}  // namespace agegraph
