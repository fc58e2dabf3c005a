#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "netcomp/components_multiplex.hpp"
#include "oracles.hpp"

using namespace netcomp;

namespace {

DegreeDistribution<double> random_multiplex2(std::mt19937_64& rng, Eigen::Index K, double origin) {
    auto raw = oracles::random_lattice(rng, {K + 1, K + 1}, 0.8, false);
    raw.flat()[0] = origin;
    // keep the excess constant terms nonzero so boundary cells are defined
    raw.at2(1, 0) = std::max(raw.at2(1, 0), 0.1);
    raw.at2(0, 1) = std::max(raw.at2(0, 1), 0.1);
    return make_distribution(DistributionKind::multiplex, raw);
}

}  // namespace

TEST_CASE("w(1) is the isolated-node mass") {
    std::mt19937_64 rng(91);
    auto u = random_multiplex2(rng, 3, 0.4);
    auto w = multiplex_components(u, 5);
    CHECK(w.w[1] == doctest::Approx(u.mass.flat()[0]).epsilon(1e-14));
}

TEST_CASE("all edges in layer one reduce to the single-layer formula") {
    Lattice<double> raw({5, 1});
    raw.flat() << 0.3, 0.3, 0.25, 0.1, 0.05;
    auto u = make_distribution(DistributionKind::multiplex, std::move(raw));
    auto w = multiplex_components(u, 30);
    // single-layer configuration-model oracle: w(n) = mu/(n-1) u_e^{*n}(n-2)
    Eigen::ArrayXd f(5);
    f << 0.3, 0.3, 0.25, 0.1, 0.05;
    double mu = 0;
    for (int k = 0; k < 5; ++k) mu += k * f[k];
    Lattice<double> ue({5});
    for (int k = 0; k + 1 < 5; ++k) ue.flat()[k] = (k + 1) * f[k + 1] / mu;
    Lattice<double> p = ue;  // ue^{*1}
    CHECK(w.w[1] == doctest::Approx(f[0]).epsilon(1e-14));
    for (int n = 2; n <= 30; ++n) {
        p = convolve_direct(p, ue, {31});  // ue^{*n}
        CHECK(w.w[n] == doctest::Approx(mu / double(n - 1) * p.flat()[n - 2]).epsilon(1e-9));
    }
}

TEST_CASE("two-layer series and lattice methods agree") {
    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 4; ++trial) {
        auto u = random_multiplex2(rng, 2, 0.5);
        auto ws = multiplex_components(u, 9, MultiplexMethod::series);
        auto wl = multiplex_components(u, 9, MultiplexMethod::lattice);
        for (Eigen::Index n = 1; n <= 9; ++n) CHECK(std::abs(ws.w[n] - wl.w[n]) < 1e-10);
    }
}

TEST_CASE("two-layer fast path equals the general N-layer path elementwise") {
    // table cells against the inversion-sum cell evaluator (same cells, two
    // different code paths)
    std::mt19937_64 rng(101);
    auto u = random_multiplex2(rng, 2, 0.5);
    const Eigen::Index n = 9;
    auto table = two_layer_lattice(u, n);
    std::vector<Lattice<double>> exc = {excess_lattice(u.mass, 0), excess_lattice(u.mass, 1)};
    std::vector<Eigen::Index> bshape = {n + 1, n + 1};
    auto det = detail::det_kernel_nd(exc, bshape);
    auto base = convolve_direct(u.mass.fitted(bshape), det, bshape);
    for (Eigen::Index i = 0; i + 1 <= n; ++i)
        for (Eigen::Index j = 0; i + j <= n - 1; ++j) {
            const double cell = detail::multiplex_cell(u.mass, exc, base, {i, j});
            CHECK(std::abs(table.a(i, j) - cell) < 1e-10);
        }
}

TEST_CASE("fig2 two-layer: table, series and cells cross-check at n <= 12") {
    auto u = make_distribution(DistributionKind::multiplex, oracles::fig2_raw());
    const Eigen::Index n = 12;
    auto table = two_layer_lattice(u, n);
    auto ws = multiplex_components(u, n, MultiplexMethod::series);
    auto wt = size_distribution_from_table(table, u, ComponentKind::multilayer);
    for (Eigen::Index s = 1; s <= n; ++s)
        CHECK(wt.w[s] == doctest::Approx(ws.w[s]).epsilon(1e-7));
    // naive fixed-point oracle on the same cells
    oracles::BivariateTableOracle oracle(u.mass, excess_lattice(u.mass, 0), excess_lattice(u.mass, 1), n);
    for (Eigen::Index i = 0; i + 1 <= n; ++i)
        for (Eigen::Index j = 0; i + j <= n - 1; ++j)
            CHECK(std::abs(table.a(i, j) - oracle.a(i, j)) < 1e-9);
}

TEST_CASE("layer swap symmetry for symmetric distributions") {
    std::mt19937_64 rng(103);
    auto raw = oracles::random_lattice(rng, {4, 4}, 1.0, true);
    // symmetrize
    for (Eigen::Index k = 0; k < 4; ++k)
        for (Eigen::Index l = 0; l < k; ++l) {
            const double v = 0.5 * (raw.at2(k, l) + raw.at2(l, k));
            raw.at2(k, l) = raw.at2(l, k) = v;
        }
    auto u = make_distribution(DistributionKind::multiplex, raw);
    auto table = two_layer_lattice(u, 8);
    for (Eigen::Index i = 0; i + 1 <= 8; ++i)
        for (Eigen::Index j = 0; i + j <= 7; ++j) CHECK(std::abs(table.a(i, j) - table.a(j, i)) < 1e-10);
}

TEST_CASE("layer permutation invariance of the size distribution") {
    std::mt19937_64 rng(107);
    auto u = random_multiplex2(rng, 3, 0.45);
    auto w1 = multiplex_components(u, 30);
    DegreeDistribution<double> ut{DistributionKind::multiplex, u.mass.transposed2(), u.renormalization,
                                  u.truncation_tail};
    auto w2 = multiplex_components(ut, 30);
    for (Eigen::Index n = 1; n <= 30; ++n) CHECK(std::abs(w1.w[n] - w2.w[n]) < 1e-10);

    // three layers: swap layers 1 and 3
    Lattice<double> raw3({3, 3, 3});
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Eigen::Index i = 0; i < raw3.size(); ++i) raw3.flat()[i] = unif(rng);
    raw3.flat()[0] = 3.0;
    auto u3 = make_distribution(DistributionKind::multiplex, raw3);
    Lattice<double> perm({3, 3, 3});
    for (Eigen::Index a = 0; a < 3; ++a)
        for (Eigen::Index b = 0; b < 3; ++b)
            for (Eigen::Index c = 0; c < 3; ++c) perm({c, b, a}) = u3.mass({a, b, c});
    auto u3p = make_distribution(DistributionKind::multiplex, std::move(perm));
    auto w3 = multiplex_components(u3, 20);
    auto w3p = multiplex_components(u3p, 20);
    for (Eigen::Index n = 1; n <= 20; ++n) CHECK(std::abs(w3.w[n] - w3p.w[n]) < 1e-10);
}

TEST_CASE("three-layer series and inversion-sum methods agree") {
    std::mt19937_64 rng(109);
    Lattice<double> raw({3, 3, 3});
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Eigen::Index i = 0; i < raw.size(); ++i) raw.flat()[i] = unif(rng);
    raw.flat()[0] = 2.0;
    auto u = make_distribution(DistributionKind::multiplex, std::move(raw));
    auto ws = multiplex_components(u, 7, MultiplexMethod::series);
    auto wl = multiplex_components(u, 7, MultiplexMethod::lattice);
    for (Eigen::Index n = 1; n <= 7; ++n)
        CHECK(wl.w[n] == doctest::Approx(ws.w[n]).epsilon(1e-8));
}

TEST_CASE("partial sums bounded for multiplex components") {
    auto u = make_distribution(DistributionKind::multiplex, oracles::fig2_raw());
    auto w = multiplex_components(u, 400);
    double acc = 0;
    for (Eigen::Index n = 1; n <= 400; ++n) acc += w.w[n];
    CHECK(acc <= 1.0 + 1e-9);
    CHECK(w.deficit > 0.0);  // fig2 carries a giant multilayer component
}

TEST_CASE("fig2 oscillations: alternating local extrema below n = 60") {
    auto u = make_distribution(DistributionKind::multiplex, oracles::fig2_raw());
    auto w = multiplex_components(u, 61);
    int extrema = 0;
    int last_kind = 0;  // +1 max, -1 min
    for (Eigen::Index n = 2; n <= 59; ++n) {
        int kind = 0;
        if (w.w[n] > w.w[n - 1] && w.w[n] > w.w[n + 1]) kind = 1;
        if (w.w[n] < w.w[n - 1] && w.w[n] < w.w[n + 1]) kind = -1;
        if (kind != 0 && kind != last_kind) {
            ++extrema;
            last_kind = kind;
        }
    }
    CHECK(extrema >= 3);
}

TEST_CASE("degenerate two-layer reduction") {
    SUBCASE("pinned mixture form") {
        Lattice<double> raw({2, 3});
        raw.at2(0, 0) = 0.2;
        raw.at2(0, 2) = 0.2;
        raw.at2(1, 1) = 0.4;
        raw.at2(1, 0) = 0.2;
        auto u = make_distribution(DistributionKind::multiplex, std::move(raw));
        auto d = degenerate_two_layer_reduce(u);
        // d(l) = u(0,l) + u(1,l)/2, renormalized (total = 0.4 + 0.3 = 0.7)
        CHECK(d.mass.flat()[0] == doctest::Approx((0.2 + 0.1) / 0.7).epsilon(1e-12));
        CHECK(d.mass.flat()[1] == doctest::Approx(0.2 / 0.7).epsilon(1e-12));
        CHECK(d.mass.flat()[2] == doctest::Approx(0.2 / 0.7).epsilon(1e-12));
    }
    SUBCASE("point mass stays a point mass") {
        Lattice<double> raw({1, 1});
        raw.flat()[0] = 1.0;
        auto u = make_distribution(DistributionKind::multiplex, std::move(raw));
        auto d = degenerate_two_layer_reduce(u);
        CHECK(d.mass.flat()[0] == doctest::Approx(1.0));
    }
    SUBCASE("u(1,1) = 1 reduces to a unit-degree layer") {
        Lattice<double> raw({2, 2});
        raw.at2(1, 1) = 1.0;
        auto u = make_distribution(DistributionKind::multiplex, std::move(raw));
        auto d = degenerate_two_layer_reduce(u);
        CHECK(d.mass.flat()[0] == doctest::Approx(0.0));
        CHECK(d.mass.flat()[1] == doctest::Approx(1.0));
        // downstream single-layer sizes: a perfect matching, all components of size 2
        auto w = single_layer_components(d, 6);
        CHECK(w.w[2] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("precondition violated") {
        Lattice<double> raw({3, 2});
        raw.at2(2, 1) = 0.5;
        raw.at2(0, 0) = 0.5;
        auto u = make_distribution(DistributionKind::multiplex, std::move(raw));
        CHECK_THROWS_WITH_AS(static_cast<void>(degenerate_two_layer_reduce(u)),
                             doctest::Contains("k > 1"), DegreeError);
    }
}
