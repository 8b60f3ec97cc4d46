#include <cmath>
#include <vector>

#include "agegraph/errors.hpp"
#include "agegraph/graph.hpp"
#include "agegraph/rng.hpp"
#include "doctest.h"

using namespace agegraph;

namespace {

// Independent cosine used as the oracle for the threshold graph.
double cosine_oracle(const Matrix& f, std::size_t i, std::size_t j) {
    double dot = 0.0, ni = 0.0, nj = 0.0;
    for (std::size_t k = 0; k < f.cols(); ++k) {
        dot += f(i, k) * f(j, k);
        ni += f(i, k) * f(i, k);
        nj += f(j, k) * f(j, k);
    }
    ni = std::sqrt(ni);
    nj = std::sqrt(nj);
    if (ni < 1e-12 || nj < 1e-12) return 0.0;
    return dot / (ni * nj);
}

}  // namespace

TEST_CASE("patch assignment maps coordinates to grid cells") {
    // 32x32 canvas, 4 patches per side, 8x8 cells.
    std::vector<Keypoint> kps = {{0.0, 0.0},  {31.9, 31.9}, {8.0, 0.0},
                                 {7.9, 7.9},  {16.0, 24.0}, {0.0, 8.0}};
    auto ids = assign_patches(kps, 32.0, 32.0, 4);
    CHECK(ids == std::vector<std::size_t>{0, 15, 1, 0, 14, 4});
}

TEST_CASE("patch assignment rejects out-of-bounds keypoints") {
    CHECK_THROWS_AS(assign_patches({{32.0, 0.0}}, 32.0, 32.0, 4), DomainError);
    CHECK_THROWS_AS(assign_patches({{0.0, -0.1}}, 32.0, 32.0, 4), DomainError);
    try {
        assign_patches({{-3.0, 5.0}}, 32.0, 32.0, 4);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("-3") != std::string::npos);
    }
}

TEST_CASE("distinct patches keep first-occurrence order and first keypoint") {
    std::vector<std::size_t> ids = {3, 3, 1, 5, 1, 3};
    auto got = distinct_patches(ids);
    REQUIRE(got.size() == 3);
    CHECK(got[0] == std::pair<std::size_t, std::size_t>{3, 0});
    CHECK(got[1] == std::pair<std::size_t, std::size_t>{1, 2});
    CHECK(got[2] == std::pair<std::size_t, std::size_t>{5, 3});
}

TEST_CASE("cosine similarity basics") {
    std::vector<double> a = {1.0, 0.0}, b = {2.0, 0.0}, c = {0.0, 3.0},
                        d = {-1.0, 0.0}, z = {0.0, 0.0};
    CHECK(cosine_similarity(a, b) == doctest::Approx(1.0));
    CHECK(cosine_similarity(a, c) == doctest::Approx(0.0));
    CHECK(cosine_similarity(a, d) == doctest::Approx(-1.0));
    CHECK(cosine_similarity(a, z) == 0.0);
    CHECK(cosine_similarity(z, z) == 0.0);
    std::vector<double> longer = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(cosine_similarity(a, longer), DimensionError);
}

TEST_CASE("initial graph matches the all-pairs threshold oracle") {
    Rng rng(404);
    Matrix f = Matrix::glorot(9, 5, rng);
    double thr = 0.2;  // low threshold so both classes of pairs occur
    FaceGraph g = build_initial_graph(f, thr);
    REQUIRE(g.adjacency.rows() == 9);
    REQUIRE(g.adjacency.cols() == 9);
    bool saw_edge = false, saw_gap = false;
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK(g.adjacency(i, i) == 0.0);
        for (std::size_t j = 0; j < 9; ++j) {
            if (i == j) continue;
            double expect = cosine_oracle(f, i, j) >= thr ? 1.0 : 0.0;
            CHECK(g.adjacency(i, j) == expect);
            CHECK(g.adjacency(i, j) == g.adjacency(j, i));
            (expect == 1.0 ? saw_edge : saw_gap) = true;
        }
    }
    CHECK(saw_edge);
    CHECK(saw_gap);
    CHECK(g.node_features == f);
    REQUIRE(g.keypoint_index.size() == 9);
    for (std::size_t i = 0; i < 9; ++i) CHECK(g.keypoint_index[i] == i);
}

TEST_CASE("identical rows connect fully at the default threshold") {
    Matrix f = Matrix::from_rows({{1.0, 2.0}, {2.0, 4.0}, {0.5, 1.0}});
    FaceGraph g = build_initial_graph(f);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(g.adjacency(i, j) == (i == j ? 0.0 : 1.0));
}

TEST_CASE("initial graph input validation") {
    CHECK_THROWS_AS(build_initial_graph(Matrix()), DomainError);
    Matrix f = Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}});
    CHECK_THROWS_AS(build_initial_graph(f, 1.5), DomainError);
    CHECK_THROWS_AS(build_initial_graph(f, -1.5), DomainError);
}

TEST_CASE("row permutation permutes the adjacency consistently") {
    Rng rng(77);
    Matrix f = Matrix::glorot(6, 4, rng);
    std::vector<std::size_t> perm = {4, 2, 0, 5, 1, 3};
    Matrix fp(6, 4);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t k = 0; k < 4; ++k) fp(i, k) = f(perm[i], k);
    Matrix a = build_initial_graph(f, 0.1).adjacency;
    Matrix ap = build_initial_graph(fp, 0.1).adjacency;
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) CHECK(ap(i, j) == a(perm[i], perm[j]));
}
