#include <cmath>
#include <vector>

#include "agegraph/errors.hpp"
#include "agegraph/gcn.hpp"
#include "agegraph/grad_check.hpp"
#include "doctest.h"

using namespace agegraph;

namespace {

Matrix tri_adj() {
    return Matrix::from_rows({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
}

// Direct transcription of D^{-1/2} (A + I) D^{-1/2} with scalar loops.
Matrix normalize_oracle(const Matrix& a) {
    std::size_t n = a.rows();
    Matrix out(n, n);
    std::vector<double> deg(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) deg[i] += a(i, j) + (i == j ? 1.0 : 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out(i, j) = (a(i, j) + (i == j ? 1.0 : 0.0)) / std::sqrt(deg[i] * deg[j]);
    return out;
}

double sigmoid_ref(double z) { return 1.0 / (1.0 + std::exp(-z)); }

RelationGraphSet single_head_set(const Matrix& x, const Matrix& adj) {
    RelationGraphSet rel;
    rel.node_features = x;
    rel.adjacencies.push_back(adj);
    return rel;
}

}  // namespace

TEST_CASE("symmetric normalization matches its oracle") {
    Matrix a = Matrix::from_rows({{0, 1, 0, 0}, {1, 0, 1, 1}, {0, 1, 0, 0}, {0, 1, 0, 0}});
    Matrix got = normalize_adjacency(a);
    CHECK(max_abs_diff(got, normalize_oracle(a)) < 1e-14);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(got(i, j) == got(j, i));
    // weighted entries from the attention path are fine, negatives are not
    Matrix weighted = Matrix::from_rows({{0.0, 0.3}, {0.3, 0.0}});
    CHECK(max_abs_diff(normalize_adjacency(weighted), normalize_oracle(weighted)) <
          1e-14);
    Matrix neg = Matrix::from_rows({{0.0, -0.1}, {-0.1, 0.0}});
    CHECK_THROWS_AS(normalize_adjacency(neg), DomainError);
    CHECK_THROWS_AS(normalize_adjacency(Matrix::from_rows({{0, 1}})), DimensionError);
}

TEST_CASE("plain layer is relu of the propagated projection") {
    Matrix a_norm = normalize_adjacency(tri_adj());
    Matrix h = Matrix::from_rows({{1.0, -2.0}, {0.5, 0.0}, {-1.0, 3.0}});
    Matrix w = Matrix::from_rows({{0.8, -0.4}, {0.2, 0.6}});
    Matrix got = gcn_layer(h, a_norm, w);
    // oracle with scalar loops
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < 3; ++t)
                for (std::size_t k = 0; k < 2; ++k)
                    acc += a_norm(i, t) * h(t, k) * w(k, j);
            CHECK(got(i, j) == doctest::Approx(std::max(acc, 0.0)).epsilon(1e-12));
        }
}

TEST_CASE("fixed residual layer blends propagation with the previous state") {
    Matrix a_norm = normalize_adjacency(tri_adj());
    Matrix h = Matrix::from_rows({{1.0, -2.0}, {0.5, 0.0}, {-1.0, 3.0}});
    Matrix prev = Matrix::from_rows({{0.2, 0.1}, {-0.3, 0.4}, {0.0, -0.5}});
    Matrix w = Matrix::from_rows({{0.8, -0.4}, {0.2, 0.6}});

    CHECK(max_abs_diff(res_gcn_layer(h, prev, a_norm, w, 0.0),
                       gcn_layer(h, a_norm, w)) < 1e-15);
    // alpha = 1 passes the previous state straight through the relu
    Matrix all_prev = res_gcn_layer(h, prev, a_norm, w, 1.0);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(all_prev(i, j) == std::max(prev(i, j), 0.0));
    // generic alpha: convex-combination oracle before the relu
    double alpha = 0.3;
    Matrix lin = matmul(matmul(a_norm, h), w);
    Matrix got = res_gcn_layer(h, prev, a_norm, w, alpha);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            double pre = (1.0 - alpha) * lin(i, j) + alpha * prev(i, j);
            CHECK(got(i, j) == doctest::Approx(std::max(pre, 0.0)).epsilon(1e-12));
        }
    CHECK_THROWS_AS(res_gcn_layer(h, prev, a_norm, w, -0.1), DomainError);
    CHECK_THROWS_AS(res_gcn_layer(h, prev, a_norm, w, 1.1), DomainError);
}

TEST_CASE("gate saturation drives the initial-residual blend to its extremes") {
    Matrix a_norm = normalize_adjacency(tri_adj());
    Matrix h = Matrix::from_rows({{1.0, -2.0}, {0.5, 0.0}, {-1.0, 3.0}});
    Matrix h0 = Matrix::from_rows({{0.2, 0.1}, {-0.3, 0.4}, {0.0, -0.5}});
    Matrix gate_zero(4, 1);

    // strongly positive bias saturates the gate at 1: pure h0
    auto [keep, beta_keep] = adaptive_initial_residual(h, h0, gate_zero, 50.0, a_norm, 0.05);
    CHECK(max_abs_diff(keep, h0) < 1e-15);
    for (double b : beta_keep) CHECK(b == doctest::Approx(1.0).epsilon(1e-12));

    // strongly negative bias floors at beta_min
    auto [prop, beta_floor] =
        adaptive_initial_residual(h, h0, gate_zero, -50.0, a_norm, 0.05);
    Matrix lin = matmul(a_norm, h);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(beta_floor[i] == 0.05);
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(prop(i, j) ==
                  doctest::Approx(0.95 * lin(i, j) + 0.05 * h0(i, j)).epsilon(1e-12));
    }
}

TEST_CASE("gate reads the initial state first, then the current layer") {
    Matrix a_norm = normalize_adjacency(tri_adj());
    Matrix h0 = Matrix::from_rows({{2.0, 0.0}, {-1.0, 0.0}, {0.5, 0.0}});
    Matrix h_a = Matrix::from_rows({{9.0, 9.0}, {9.0, 9.0}, {9.0, 9.0}});
    Matrix h_b = Matrix::from_rows({{-9.0, 4.0}, {1.0, -7.0}, {0.0, 0.0}});
    // weight only on the first block, which must be h0
    Matrix gate(4, 1);
    gate(0, 0) = 1.5;
    auto beta_a = adaptive_initial_residual(h_a, h0, gate, 0.0, a_norm, 0.05).second;
    auto beta_b = adaptive_initial_residual(h_b, h0, gate, 0.0, a_norm, 0.05).second;
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(beta_a[i] == doctest::Approx(beta_b[i]).epsilon(1e-15));
        double want = std::max(sigmoid_ref(1.5 * h0(i, 0)), 0.05);
        CHECK(beta_a[i] == doctest::Approx(want).epsilon(1e-12));
    }
    Matrix bad_gate(5, 1);
    CHECK_THROWS_AS(adaptive_initial_residual(h_a, h0, bad_gate, 0.0, a_norm, 0.05),
                    DimensionError);
}

TEST_CASE("developmental layer follows the cosine-driven blend oracle") {
    Matrix a_norm = normalize_adjacency(tri_adj());
    Matrix cur = Matrix::from_rows({{1.0, 2.0}, {0.5, -0.5}, {-1.0, 3.0}});
    Matrix prev = Matrix::from_rows({{2.0, 4.0}, {0.5, 0.5}, {3.0, 1.0}});
    Matrix w = Matrix::from_rows({{0.8, -0.4}, {0.2, 0.6}});

    // oracle for the mean row cosine
    double cbar = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (std::size_t j = 0; j < 2; ++j) {
            dot += cur(i, j) * prev(i, j);
            na += cur(i, j) * cur(i, j);
            nb += prev(i, j) * prev(i, j);
        }
        cbar += dot / (std::sqrt(na) * std::sqrt(nb));
    }
    cbar /= 3.0;

    double alpha_a = 0.2, alpha_b = -0.7;
    auto [got, alpha] = dynamic_developmental_layer(cur, prev, w, alpha_a, alpha_b, a_norm);
    double want_alpha = sigmoid_ref(alpha_a + alpha_b * cbar);
    CHECK(alpha == doctest::Approx(want_alpha).epsilon(1e-12));
    Matrix lin = matmul(matmul(a_norm, cur), w);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            double pre = (1.0 - want_alpha) * lin(i, j) + want_alpha * prev(i, j);
            CHECK(got(i, j) == doctest::Approx(std::max(pre, 0.0)).epsilon(1e-12));
        }
    // identical states have cosine exactly 1
    auto same = dynamic_developmental_layer(cur, cur, w, 0.0, 2.0, a_norm);
    CHECK(same.second == doctest::Approx(sigmoid_ref(2.0)).epsilon(1e-12));
}

TEST_CASE("stack parameter registry differs by mode") {
    StackConfig cfg;
    cfg.depth = 2;
    cfg.width = 4;
    ParamStore full, vanilla;
    Rng r1(3), r2(3);
    init_stack_params(full, 5, cfg, r1);
    cfg.mode = StackMode::Vanilla;
    init_stack_params(vanilla, 5, cfg, r2);
    CHECK(full.value("stack.win").rows() == 5);
    CHECK(full.value("stack.l0.gate_w").rows() == 8);
    CHECK(full.value("stack.l1.alpha_a")(0, 0) == 0.0);
    CHECK_THROWS_AS(vanilla.value("stack.l0.gate_w"), StateError);
    CHECK(vanilla.value("stack.l1.w").cols() == 4);
    StackConfig bad;
    bad.depth = 0;
    ParamStore p;
    Rng r3(1);
    CHECK_THROWS_AS(init_stack_params(p, 5, bad, r3), DomainError);
}

TEST_CASE("vanilla stack composes plain layers after the input projection") {
    StackConfig cfg;
    cfg.depth = 3;
    cfg.width = 4;
    cfg.mode = StackMode::Vanilla;
    ParamStore store;
    Rng rng(21);
    init_stack_params(store, 3, cfg, rng);
    Matrix x = Matrix::glorot(5, 3, rng);
    Matrix adj = build_initial_graph(x, 0.0).adjacency;

    StackOutput out = forward_stack(single_head_set(x, adj), store, cfg);
    Matrix a_norm = normalize_adjacency(adj);
    Matrix h = matmul(x, store.value("stack.win"));
    for (std::size_t i = 0; i < h.rows(); ++i)
        for (std::size_t j = 0; j < h.cols(); ++j)
            h(i, j) += store.value("stack.bin")(0, j);
    for (std::size_t l = 0; l < 3; ++l)
        h = gcn_layer(h, a_norm, store.value("stack.l" + std::to_string(l) + ".w"));
    REQUIRE(out.head_embeddings.size() == 1);
    CHECK(max_abs_diff(out.head_embeddings[0], h) < 1e-13);
    CHECK(max_abs_diff(out.fused_nodes, h) < 1e-13);
    for (std::size_t j = 0; j < 4; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < 5; ++i) mean += h(i, j) / 5.0;
        CHECK(out.graph_embedding(0, j) == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("head fusion averages per-head embeddings") {
    StackConfig cfg;
    cfg.depth = 1;
    cfg.width = 4;
    cfg.mode = StackMode::Vanilla;
    ParamStore store;
    Rng rng(8);
    init_stack_params(store, 3, cfg, rng);
    Matrix x = Matrix::glorot(4, 3, rng);
    Matrix a1 = build_initial_graph(x, 0.0).adjacency;
    Matrix a2 = Matrix(4, 4);  // empty graph still works through self-loops

    RelationGraphSet rel;
    rel.node_features = x;
    rel.adjacencies = {a1, a2};
    StackOutput both = forward_stack(rel, store, cfg);
    StackOutput first = forward_stack(single_head_set(x, a1), store, cfg);
    StackOutput second = forward_stack(single_head_set(x, a2), store, cfg);
    Matrix want = scale(add(first.fused_nodes, second.fused_nodes), 0.5);
    CHECK(max_abs_diff(both.fused_nodes, want) < 1e-13);
    REQUIRE(both.head_embeddings.size() == 2);
    CHECK(max_abs_diff(both.head_embeddings[1], second.head_embeddings[0]) == 0.0);
}

TEST_CASE("full stack records gates and both tracks advance") {
    StackConfig cfg;
    cfg.depth = 3;
    cfg.width = 6;
    ParamStore store;
    Rng rng(99);
    init_stack_params(store, 4, cfg, rng);
    Matrix x = Matrix::glorot(7, 4, rng);
    Matrix adj = build_initial_graph(x, 0.0).adjacency;
    StackOutput out = forward_stack(single_head_set(x, adj), store, cfg);
    REQUIRE(out.alpha.size() == 1);
    REQUIRE(out.alpha[0].size() == 3);
    REQUIRE(out.beta_mean[0].size() == 3);
    for (double a : out.alpha[0]) {
        CHECK(a > 0.0);
        CHECK(a < 1.0);
    }
    for (double b : out.beta_mean[0]) {
        CHECK(b >= 0.05);
        CHECK(b <= 1.0);
    }
    CHECK(out.node_variance > 0.0);
}

TEST_CASE("tape stack reproduces the plain stack in every mode") {
    for (StackMode mode : {StackMode::Full, StackMode::Vanilla, StackMode::ResGcn}) {
        StackConfig cfg;
        cfg.depth = 2;
        cfg.width = 5;
        cfg.mode = mode;
        ParamStore store;
        Rng rng(314);
        init_stack_params(store, 3, cfg, rng);
        Matrix x = Matrix::glorot(6, 3, rng);
        Matrix adj = build_initial_graph(x, 0.0).adjacency;

        StackOutput plain = forward_stack(single_head_set(x, adj), store, cfg);
        Tape tape;
        StackTapeOut taped = forward_stack_tape(tape, store, tape.constant(x),
                                                {tape.constant(adj)}, cfg);
        CHECK(max_abs_diff(tape.value(taped.fused_nodes), plain.fused_nodes) < 1e-12);
        CHECK(max_abs_diff(tape.value(taped.graph_embedding), plain.graph_embedding) <
              1e-12);
    }
}

TEST_CASE("full-mode stack passes the finite-difference check") {
    StackConfig cfg;
    cfg.depth = 2;
    cfg.width = 4;
    ParamStore store;
    Rng rng(2718);
    init_stack_params(store, 3, cfg, rng);
    Matrix x = Matrix::glorot(5, 3, rng);
    Matrix adj = build_initial_graph(x, 0.0).adjacency;

    auto loss_fn = [&](Tape& t, ParamStore& s) {
        StackTapeOut out =
            forward_stack_tape(t, s, t.constant(x), {t.constant(adj)}, cfg);
        return t.sum(t.hadamard(out.fused_nodes, out.fused_nodes));
    };
    GradCheckOptions opt;
    GradCheckResult res = check_gradients(store, loss_fn, opt);
    if (!res.kink_safe) {
        // relu sat right at a kink for this draw; a nudged model must resolve it
        Rng rng2(2719);
        ParamStore store2;
        init_stack_params(store2, 3, cfg, rng2);
        res = check_gradients(store2, loss_fn, opt);
    }
    CHECK(res.deterministic);
    CHECK(res.max_rel_error < 1e-4);
}

TEST_CASE("row collapse metric") {
    Matrix two = Matrix::from_rows({{0.0, 0.0}, {3.0, 4.0}});
    CHECK(mean_pairwise_row_distance(two) == doctest::Approx(5.0));
    Matrix same = Matrix::from_rows({{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}});
    CHECK(mean_pairwise_row_distance(same) == 0.0);
    CHECK(mean_pairwise_row_distance(Matrix(1, 3)) == 0.0);
}
