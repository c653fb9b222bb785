#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "quenchmap/encoding.hpp"
#include "quenchmap/rng.hpp"

#include "helpers.hpp"

using namespace quenchmap;
using testutil::TempDir;

namespace {

/// Columns engineered so the population correlations are exactly
/// rho(0,1) = 0.5, rho(0,2) = 0 and rho(1,2) = -0.5.
Matrix correlation_fixture() {
    const double r3 = std::sqrt(3.0), r2 = std::sqrt(2.0);
    Matrix m(4, 3);
    const double col0[4] = {1, 1, -1, -1};
    const double col1[4] = {1 + r3, 1 - r3, r3 - 1, -1 - r3};
    const double col2[4] = {-1 + r2, 1 - r2, -1 - r2, 1 + r2};
    for (std::size_t i = 0; i < 4; ++i) {
        m(i, 0) = col0[i];
        m(i, 1) = col1[i];
        m(i, 2) = col2[i];
    }
    return m;
}

} // namespace

TEST_SUITE("encoding") {

TEST_CASE("pearson correlation on engineered columns") {
    const Matrix m = correlation_fixture();
    std::vector<double> c0(4), c1(4), c2(4);
    for (std::size_t i = 0; i < 4; ++i) {
        c0[i] = m(i, 0);
        c1[i] = m(i, 1);
        c2[i] = m(i, 2);
    }
    CHECK(pearson(c0, c1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(pearson(c0, c2) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(pearson(c1, c2) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(pearson(c0, c0) == doctest::Approx(1.0).epsilon(1e-14));
    // constant input yields 0, not NaN
    CHECK(pearson(std::vector<double>{2, 2, 2, 2}, c0) == 0.0);
}

TEST_CASE("fit_couplings keeps strong pairs with J = -scale * rho") {
    EncodingOptions opts;
    opts.corr_threshold = 0.3;
    const CouplingGraph g = fit_couplings(correlation_fixture(), opts);
    REQUIRE(g.n == 3);
    REQUIRE(g.edges.size() == 2);
    CHECK(g.edges[0].i == 0);
    CHECK(g.edges[0].j == 1);
    CHECK(g.edges[0].weight == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(g.edges[1].i == 1);
    CHECK(g.edges[1].j == 2);
    CHECK(g.edges[1].weight == doctest::Approx(0.5).epsilon(1e-14));

    EncodingOptions scaled = opts;
    scaled.coupling_scale = 1.6;
    const CouplingGraph gs = fit_couplings(correlation_fixture(), scaled);
    CHECK(gs.edges[0].weight == doctest::Approx(-0.8).epsilon(1e-14));

    // a scale that would push |J| past j_max must be rejected
    EncodingOptions toobig = opts;
    toobig.coupling_scale = 2.5;
    CHECK_THROWS(fit_couplings(correlation_fixture(), toobig));
}

TEST_CASE("degree cap keeps an edge whenever either endpoint ranks it") {
    Rng rng(31);
    Matrix m(60, 8);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double base = rng.normal();
        for (std::size_t j = 0; j < m.cols; ++j)
            m(i, j) = 0.6 * base + rng.normal(); // everything mildly correlated
    }
    EncodingOptions opts;
    opts.corr_threshold = 0.05;
    const CouplingGraph all = fit_couplings(m, opts);
    REQUIRE(all.edges.size() > 8); // dense candidate set

    opts.max_degree = 2;
    const CouplingGraph capped = fit_couplings(m, opts);
    CHECK(capped.edges.size() < all.edges.size());

    // rank candidate edges per node by |J| descending, ties by (i, j)
    auto kept_by = [&](int node, const CouplingGraph::Edge& e) {
        std::vector<CouplingGraph::Edge> mine;
        for (const auto& c : all.edges)
            if (c.i == node || c.j == node) mine.push_back(c);
        std::stable_sort(mine.begin(), mine.end(), [](const auto& a, const auto& b) {
            return std::abs(a.weight) > std::abs(b.weight);
        });
        for (std::size_t r = 0; r < mine.size() && r < 2; ++r)
            if (mine[r].i == e.i && mine[r].j == e.j) return true;
        return false;
    };
    for (const auto& e : all.edges) {
        const bool survives = kept_by(e.i, e) || kept_by(e.j, e);
        const bool present =
            std::any_of(capped.edges.begin(), capped.edges.end(),
                        [&](const auto& c) { return c.i == e.i && c.j == e.j; });
        CHECK(present == survives);
    }
}

TEST_CASE("encode_sample clamps fields at h_max") {
    CouplingGraph g;
    g.n = 3;
    g.edges = {{0, 2, 0.25}};
    const std::vector<double> x = {0.5, -7.0, 3.0};
    const IsingInstance inst = encode_sample(x, g, 4.0);
    CHECK(inst.n == 3);
    CHECK(inst.fields == std::vector<double>{0.5, -4.0, 3.0});
    CHECK(inst.couplings.edges.size() == 1);
    CHECK_THROWS(encode_sample(std::vector<double>{1.0}, g, 4.0));
}

TEST_CASE("diagonal energies match hand-computed tables") {
    IsingInstance one;
    one.n = 1;
    one.fields = {1.0};
    one.couplings.n = 1;
    CHECK(diagonal_energies(one) == std::vector<double>{1.0, -1.0});

    IsingInstance two;
    two.n = 2;
    two.fields = {-1.0, 1.0};
    two.couplings.n = 2;
    two.couplings.edges = {{0, 1, -0.5}};
    // basis order b = 0,1,2,3; bit i set means z_i = -1
    CHECK(diagonal_energies(two) == std::vector<double>{-0.5, 2.5, -1.5, -0.5});
}

TEST_CASE("negating all fields mirrors the spectrum under global spin flip") {
    Rng rng(7);
    IsingInstance inst;
    inst.n = 5;
    inst.couplings.n = 5;
    for (int i = 0; i < 5; ++i) inst.fields.push_back(rng.uniform(-2.0, 2.0));
    inst.couplings.edges = {{0, 1, 0.4}, {1, 3, -0.7}, {2, 4, 0.9}};

    IsingInstance flipped = inst;
    for (auto& h : flipped.fields) h = -h;

    const std::vector<double> e = diagonal_energies(inst);
    const std::vector<double> ef = diagonal_energies(flipped);
    const std::size_t mask = e.size() - 1;
    for (std::size_t b = 0; b < e.size(); ++b) CHECK(ef[b] == e[b ^ mask]);
}

TEST_CASE("instance and couplings files round-trip") {
    TempDir tmp;
    IsingInstance inst;
    inst.n = 3;
    inst.fields = {0.25, -1.75, 2.0};
    inst.couplings.n = 3;
    inst.couplings.edges = {{0, 1, -0.5}, {1, 2, 0.125}};
    save_instance(tmp.file("inst.txt"), inst);
    const IsingInstance back = load_instance(tmp.file("inst.txt"));
    CHECK(back.n == inst.n);
    CHECK(back.fields == inst.fields);
    REQUIRE(back.couplings.edges.size() == 2);
    CHECK(back.couplings.edges[1].weight == 0.125);

    save_couplings(tmp.file("g.txt"), inst.couplings);
    const CouplingGraph g = load_couplings(tmp.file("g.txt"));
    CHECK(g.n == 3);
    REQUIRE(g.edges.size() == 2);
    CHECK(g.edges[0].weight == -0.5);

    // couplings files must not smuggle in field lines
    testutil::write_text(tmp.file("bad.txt"), "n 2\nh 0 1.5\nJ 0 1 0.25\n");
    CHECK_THROWS(load_couplings(tmp.file("bad.txt")));
}

TEST_CASE("coupling graph validation rejects malformed edge lists") {
    CouplingGraph g;
    g.n = 3;
    g.edges = {{1, 0, 0.5}};
    CHECK_THROWS(g.validate()); // i >= j
    g.edges = {{0, 1, 0.5}, {0, 1, 0.2}};
    CHECK_THROWS(g.validate()); // duplicate pair
    g.edges = {{0, 1, 1.5}};
    CHECK_THROWS(g.validate()); // |J| above j_max
    g.edges = {{0, 3, 0.5}};
    CHECK_THROWS(g.validate()); // node out of range
    g.edges = {{0, 2, 0.5}, {1, 2, -0.25}};
    CHECK_NOTHROW(g.validate());
}

} // TEST_SUITE
