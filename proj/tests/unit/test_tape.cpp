#include <doctest.h>

#include <cmath>
#include <functional>
#include <string>

#include "agegraph/errors.hpp"
#include "agegraph/rng.hpp"
#include "agegraph/tape.hpp"

using namespace agegraph;

namespace {

using Builder = std::function<Tape::NodeId(Tape&, ParamStore&)>;

// Local central-difference oracle, deliberately separate from grad_check.
double max_rel_error(ParamStore& store, const Builder& build, double eps = 1e-5) {
    store.zero_grad();
    {
        Tape tape;
        auto loss = build(tape, store);
        tape.backward(loss);
    }
    double worst = 0.0;
    for (auto& entry : store.entries()) {
        Matrix& theta = store.value(entry.name);
        const Matrix& analytic = store.grad(entry.name);
        for (std::size_t i = 0; i < theta.rows(); ++i)
            for (std::size_t j = 0; j < theta.cols(); ++j) {
                double saved = theta(i, j);
                theta(i, j) = saved + eps;
                Tape tp;
                double up = tp.scalar(build(tp, store));
                theta(i, j) = saved - eps;
                Tape tm;
                double down = tm.scalar(build(tm, store));
                theta(i, j) = saved;
                double numeric = (up - down) / (2.0 * eps);
                double a = analytic(i, j);
                double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
                worst = std::max(worst, std::fabs(a - numeric) / denom);
            }
    }
    return worst;
}

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.normal() * scale;
    return m;
}

}  // namespace

TEST_CASE("loss = sum(W) gives an all-ones gradient") {
    ParamStore store;
    store.add("w", Matrix::from_rows({{1, -2}, {3, 4}}));
    Tape tape;
    auto loss = tape.sum(tape.param(store, "w"));
    tape.backward(loss);
    CHECK(store.grad("w") == Matrix::filled(2, 2, 1.0));
}

TEST_CASE("loss = sum(W.W)/2 gives gradient W") {
    ParamStore store;
    Matrix w = Matrix::from_rows({{0.5, -1.25}, {2.0, 0.0}});
    store.add("w", w);
    Tape tape;
    auto p = tape.param(store, "w");
    auto loss = tape.scale(tape.sum(tape.hadamard(p, p)), 0.5);
    tape.backward(loss);
    CHECK(store.grad("w") == w);
}

TEST_CASE("gradient accumulation doubles across two backwards") {
    ParamStore store;
    store.add("w", Matrix::from_rows({{1.0, 2.0}}));
    Matrix single;
    {
        Tape tape;
        auto p = tape.param(store, "w");
        auto loss = tape.sum(tape.hadamard(p, p));
        tape.backward(loss);
        single = store.grad("w");
    }
    {
        Tape tape;
        auto p = tape.param(store, "w");
        auto loss = tape.sum(tape.hadamard(p, p));
        tape.backward(loss);
    }
    CHECK(store.grad("w") == scale(single, 2.0));
}

TEST_CASE("backward on an empty tape or non-scalar node throws") {
    Tape empty;
    CHECK_THROWS_AS(empty.backward(0), StateError);

    ParamStore store;
    store.add("w", Matrix(2, 2));
    Tape tape;
    auto p = tape.param(store, "w");
    CHECK_THROWS_AS(tape.backward(p), DimensionError);
}

TEST_CASE("gradient read before backward throws") {
    Tape tape;
    auto c = tape.constant(Matrix(1, 1));
    CHECK_THROWS_AS(tape.grad(c), StateError);
}

TEST_CASE("param nodes are memoized per store and name") {
    ParamStore store;
    store.add("w", Matrix(1, 1));
    Tape tape;
    CHECK(tape.param(store, "w") == tape.param(store, "w"));
}

TEST_CASE("linear-algebra ops match finite differences") {
    Rng rng(101);
    ParamStore store;
    store.add("a", random_matrix(3, 4, rng));
    store.add("b", random_matrix(4, 2, rng));
    store.add("c", random_matrix(3, 2, rng));
    store.add("d", random_matrix(4, 2, rng));

    Builder build = [](Tape& t, ParamStore& s) {
        auto a = t.param(s, "a");
        auto b = t.param(s, "b");
        auto c = t.param(s, "c");
        auto prod = t.matmul(a, b);                  // 3x2
        auto mixed = t.add(prod, c);                 // 3x2
        auto nt = t.matmul_nt(mixed, t.param(s, "d"));  // 3x4
        auto diff = t.sub(nt, t.scale(t.transpose(t.transpose(a)), 0.25));
        return t.sum(t.hadamard(diff, diff));
    };
    CHECK(max_rel_error(store, build) < 1e-6);
}

TEST_CASE("broadcast, concat and reductions match finite differences") {
    Rng rng(102);
    ParamStore store;
    store.add("x", random_matrix(3, 3, rng));
    store.add("bias", random_matrix(1, 3, rng));
    store.add("y", random_matrix(3, 2, rng));

    Builder build = [](Tape& t, ParamStore& s) {
        auto x = t.param(s, "x");
        auto shifted = t.add_row_broadcast(x, t.param(s, "bias"));  // 3x3
        auto joined = t.concat_cols(shifted, t.param(s, "y"));      // 3x5
        auto per_row = t.row_sums(joined);                          // 3x1
        auto scaled = t.scale_rows(joined, per_row);                // 3x5
        auto mean = t.mean_over_rows(scaled);                       // 1x5
        auto picked = t.pick(scaled, 1, 3);
        return t.add(t.sum(mean), picked);
    };
    CHECK(max_rel_error(store, build) < 1e-6);
}

TEST_CASE("scale_cols matches finite differences") {
    Rng rng(103);
    ParamStore store;
    store.add("x", random_matrix(4, 3, rng));
    Matrix col = random_matrix(3, 1, rng);
    for (std::size_t i = 0; i < 3; ++i) col(i, 0) = 1.0 + std::fabs(col(i, 0));
    store.add("col", col);

    Builder build = [](Tape& t, ParamStore& s) {
        auto scaled = t.scale_cols(t.param(s, "x"), t.param(s, "col"));
        return t.sum(t.hadamard(scaled, scaled));
    };
    CHECK(max_rel_error(store, build) < 1e-6);
}

TEST_CASE("row_softmax gradient matches finite differences") {
    Rng rng(104);
    ParamStore store;
    store.add("logits", random_matrix(3, 5, rng, 2.0));
    store.add("w", random_matrix(3, 5, rng));

    Builder build = [](Tape& t, ParamStore& s) {
        auto sm = t.row_softmax(t.param(s, "logits"));
        return t.sum(t.hadamard(sm, t.param(s, "w")));
    };
    CHECK(max_rel_error(store, build) < 1e-6);
}

TEST_CASE("softmax plus cross-entropy gradient equals p minus y") {
    // Closed-form oracle: d(-log p_k)/dlogits = p - onehot(k).
    ParamStore store;
    store.add("logits", Matrix::from_rows({{0.2, -1.1, 0.7, 0.4}}));
    Tape tape;
    auto sm = tape.row_softmax(tape.param(store, "logits"));
    auto p_true = tape.pick(sm, 0, 2);
    auto loss = tape.scale(tape.log(p_true), -1.0);
    tape.backward(loss);

    const Matrix& p = tape.value(sm);
    const Matrix& g = store.grad("logits");
    for (int j = 0; j < 4; ++j) {
        double expect = p(0, j) - (j == 2 ? 1.0 : 0.0);
        CHECK(g(0, j) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("elementwise nonlinearities match finite differences away from kinks") {
    ParamStore store;
    store.add("x", Matrix::from_rows({{0.8, -1.3, 2.1}, {-0.6, 1.7, -2.4}}));

    Builder build = [](Tape& t, ParamStore& s) {
        auto x = t.param(s, "x");
        auto r = t.relu(x);
        auto a = t.abs(x);
        auto c = t.clamp_min(x, 0.05);
        auto sig = t.sigmoid(x);
        auto mix = t.add(t.add(r, a), t.add(c, sig));
        return t.sum(t.hadamard(mix, mix));
    };
    CHECK(max_rel_error(store, build, 1e-6) < 1e-5);
}

TEST_CASE("log and pow_const match finite differences on positive inputs") {
    ParamStore store;
    store.add("x", Matrix::from_rows({{0.7, 1.9}, {3.2, 0.35}}));

    Builder build = [](Tape& t, ParamStore& s) {
        auto x = t.param(s, "x");
        auto lg = t.log(x);
        auto pw = t.pow_const(x, -0.5);
        return t.add(t.sum(lg), t.sum(pw));
    };
    CHECK(max_rel_error(store, build) < 1e-6);

    Tape tape;
    auto bad = tape.constant(Matrix::from_rows({{-1.0}}));
    CHECK_THROWS_AS(tape.log(bad), DomainError);
}

TEST_CASE("huber matches finite differences in both branches") {
    ParamStore store;
    store.add("x", Matrix::from_rows({{0.4, -0.6, 2.5, -3.1}}));

    Builder build = [](Tape& t, ParamStore& s) {
        return t.sum(t.huber(t.param(s, "x"), 1.0));
    };
    CHECK(max_rel_error(store, build) < 1e-6);
}

TEST_CASE("mean_row_cosine value and gradient") {
    // Hand case: identical rows give cosine 1, orthogonal rows give 0.
    Tape tape;
    auto a = tape.constant(Matrix::from_rows({{1, 0}, {0, 2}}));
    auto b = tape.constant(Matrix::from_rows({{2, 0}, {3, 0}}));
    CHECK(tape.scalar(tape.mean_row_cosine(a, b)) == doctest::Approx(0.5).epsilon(1e-12));

    Rng rng(105);
    ParamStore store;
    ParamStore dummy;
    store.add("u", random_matrix(3, 4, rng));
    store.add("v", random_matrix(3, 4, rng));
    Builder build = [](Tape& t, ParamStore& s) {
        return t.mean_row_cosine(t.param(s, "u"), t.param(s, "v"));
    };
    CHECK(max_rel_error(store, build) < 1e-6);
}

TEST_CASE("zero-norm rows contribute nothing to mean_row_cosine") {
    Tape tape;
    auto a = tape.constant(Matrix::from_rows({{0, 0}, {1, 0}}));
    auto b = tape.constant(Matrix::from_rows({{1, 1}, {1, 0}}));
    CHECK(tape.scalar(tape.mean_row_cosine(a, b)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("kink margin reports nearest relu/clamp approach") {
    Tape tape;
    auto x = tape.constant(Matrix::from_rows({{0.5, -0.003, 7.0}}));
    tape.relu(x);
    CHECK(tape.kink_margin() == doctest::Approx(0.003).epsilon(1e-12));

    Tape tape2;
    auto y = tape2.constant(Matrix::from_rows({{0.30, 0.28}}));
    tape2.clamp_min(y, 0.25);
    CHECK(tape2.kink_margin() == doctest::Approx(0.03).epsilon(1e-9));
}

TEST_CASE("sigmoid is stable for extreme inputs") {
    Tape tape;
    auto x = tape.constant(Matrix::from_rows({{800.0, -800.0}}));
    auto s = tape.sigmoid(x);
    CHECK(tape.value(s)(0, 0) == doctest::Approx(1.0));
    CHECK(tape.value(s)(0, 1) == doctest::Approx(0.0));
}
