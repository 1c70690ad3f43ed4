// Ensemble generators: exact combinatorial structure where it's deterministic,
// concentration bounds where it's random, bit-level determinism everywhere.

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "qflimit/ensembles.hpp"

namespace {

using namespace qflimit;

TEST(Ensembles, CompleteGraph) {
    const Graph g = generate(EnsembleSpec::complete(4));
    EXPECT_EQ(g.n(), 4);
    EXPECT_EQ(g.edge_count(), 6u);
    for (int s = 1; s <= 4; ++s) EXPECT_EQ(g.degree(s), 3u);
    EXPECT_EQ(generate(EnsembleSpec::complete(200)).edge_count(), 19900u);
}

TEST(Ensembles, ErdosRenyiDeterminismAndSeedSensitivity) {
    const auto s42 = EnsembleSpec::erdos_renyi(100, 0.5, 42);
    const Graph a = generate(s42);
    const Graph b = generate(s42);
    EXPECT_EQ(a.flat_edges(), b.flat_edges());
    const Graph c = generate(EnsembleSpec::erdos_renyi(100, 0.5, 43));
    EXPECT_NE(a.flat_edges(), c.flat_edges());
}

TEST(Ensembles, ErdosRenyiEdgeCountConcentration) {
    const long long n = 400;
    const double p = 0.3;
    const Graph g = generate(EnsembleSpec::erdos_renyi(n, p, 7));
    const double pairs = double(n) * double(n - 1) / 2.0;
    const double mean = pairs * p;
    const double sd = std::sqrt(pairs * p * (1 - p));
    EXPECT_NEAR(static_cast<double>(g.edge_count()), mean, 5 * sd);
}

TEST(Ensembles, ErdosRenyiPOneIsComplete) {
    const Graph g = generate(EnsembleSpec::erdos_renyi(30, 1.0, 0));
    EXPECT_EQ(g.edge_count(), 435u);
}

TEST(Ensembles, SbmMatchesErWhenPEqualsQ) {
    // With p == q every pair is tested at the same probability in the same
    // lexicographic stream order, so the graph coincides with ER bit for bit.
    const Graph s = generate(EnsembleSpec::sbm(80, 0.4, 0.4, 5));
    const Graph e = generate(EnsembleSpec::erdos_renyi(80, 0.4, 5));
    EXPECT_EQ(s.flat_edges(), e.flat_edges());
}

TEST(Ensembles, SbmBlockDensities) {
    const long long n = 300;
    const Graph g = generate(EnsembleSpec::sbm(n, 0.8, 0.2, 11));
    // Count within- vs across-block edges in original labels.
    std::uint64_t within = 0, across = 0;
    const auto& fe = g.flat_edges();
    for (std::size_t i = 0; i < fe.size(); i += 2) {
        const int u = g.original_label(static_cast<int>(fe[i]) + 1);
        const int v = g.original_label(static_cast<int>(fe[i + 1]) + 1);
        const bool bu = u <= n / 2, bv = v <= n / 2;
        (bu == bv ? within : across) += 1;
    }
    const double wpairs = 2.0 * (n / 2.0) * (n / 2.0 - 1) / 2.0;
    const double apairs = (n / 2.0) * (n / 2.0);
    EXPECT_NEAR(double(within), wpairs * 0.8, 5 * std::sqrt(wpairs * 0.8 * 0.2));
    EXPECT_NEAR(double(across), apairs * 0.2, 5 * std::sqrt(apairs * 0.2 * 0.8));
}

TEST(Ensembles, CompleteBipartiteShape) {
    const Graph g = generate(EnsembleSpec::complete_bipartite(3, 5));
    EXPECT_EQ(g.n(), 8);
    EXPECT_EQ(g.edge_count(), 15u);
    // degree-ordered: three hubs of degree 5, five leaves of degree 3
    EXPECT_EQ(g.degree(1), 5u);
    EXPECT_EQ(g.degree(3), 5u);
    EXPECT_EQ(g.degree(4), 3u);
    EXPECT_EQ(g.degree(8), 3u);
    const Graph big = generate(EnsembleSpec::complete_bipartite(70, 4900));
    EXPECT_EQ(big.edge_count(), 70u * 4900u);
}

TEST(Ensembles, StarUnionStructure) {
    // Union of stars K_{1,2^s}, s = 1..m: n = 2^{m+1} - 2 + m hubs' leaves
    // plus hubs, |E| = 2^{m+1} - 2.
    for (int m : {1, 3, 5}) {
        const Graph g = generate(EnsembleSpec::star_union(m));
        const std::uint64_t leaves = (1ull << (m + 1)) - 2;
        EXPECT_EQ(g.edge_count(), leaves);
        EXPECT_EQ(g.n(), static_cast<int>(leaves) + m);
        // largest hub has degree 2^m
        EXPECT_EQ(g.degree(1), static_cast<std::uint32_t>(1u << m));
    }
}

TEST(Ensembles, CoexistenceStructure) {
    const long long n = 30;
    const Graph g = generate(EnsembleSpec::coexistence(n, 3));
    EXPECT_EQ(g.n(), static_cast<int>(n * n + 1));
    // hub connects to everything: degree n^2, always the top-ranked vertex
    EXPECT_EQ(g.degree(1), static_cast<std::uint32_t>(n * n));
    // |E| = n^2 + Bin(C(n,2), 1/2) + Bin(C(n^2-n,2), 1/n^2) ~ (7/4) n^2
    const double expected = 1.75 * double(n) * double(n);
    EXPECT_NEAR(static_cast<double>(g.edge_count()), expected, 0.10 * expected);
}

TEST(Ensembles, JsonRoundTrip) {
    const EnsembleSpec specs[] = {
        EnsembleSpec::complete(10),
        EnsembleSpec::erdos_renyi(50, 0.25, 9),
        EnsembleSpec::sbm(40, 0.7, 0.1, 2),
        EnsembleSpec::complete_bipartite(3, 17),
        EnsembleSpec::star_union(4),
        EnsembleSpec::coexistence(12, 8),
    };
    for (const auto& s : specs) {
        const EnsembleSpec t = EnsembleSpec::from_json(s.to_json());
        EXPECT_EQ(t.kind, s.kind);
        EXPECT_EQ(t.n, s.n);
        EXPECT_EQ(t.a, s.a);
        EXPECT_EQ(t.m, s.m);
        EXPECT_DOUBLE_EQ(t.p, s.p);
        EXPECT_DOUBLE_EQ(t.q, s.q);
        EXPECT_EQ(t.seed, s.seed);
        EXPECT_EQ(generate(t).flat_edges(), generate(s).flat_edges());
    }
    EXPECT_THROW(EnsembleSpec::from_json(nlohmann::json{{"kind", "nope"}}), ParseError);
}

TEST(Ensembles, ValidationErrors) {
    EXPECT_THROW(EnsembleSpec::complete(1).validate(), InvalidParameter);
    EXPECT_THROW(EnsembleSpec::erdos_renyi(10, 0.0, 0).validate(), InvalidParameter);
    EXPECT_THROW(EnsembleSpec::erdos_renyi(10, 1.5, 0).validate(), InvalidParameter);
    EXPECT_THROW(EnsembleSpec::sbm(11, 0.5, 0.5, 0).validate(), InvalidParameter);  // odd n
    EXPECT_THROW(EnsembleSpec::sbm(10, 0.5, -0.1, 0).validate(), InvalidParameter);
    EXPECT_THROW(EnsembleSpec::complete_bipartite(0, 5).validate(), InvalidParameter);
    EXPECT_THROW(EnsembleSpec::star_union(0).validate(), InvalidParameter);
    EXPECT_THROW(EnsembleSpec::star_union(25).validate(), InvalidParameter);
    EXPECT_THROW(EnsembleSpec::coexistence(1, 0).validate(), InvalidParameter);
}

TEST(Ensembles, SparseErCanBeEmpty) {
    // When every pair test fails at tiny p the generator must surface
    // RandomGraphEmpty rather than construct an invalid graph.
    bool threw = false;
    for (std::uint64_t seed = 0; seed < 200 && !threw; ++seed) {
        try {
            (void)generate(EnsembleSpec::erdos_renyi(3, 1e-9, seed));
        } catch (const RandomGraphEmpty&) {
            threw = true;
        }
    }
    EXPECT_TRUE(threw);
}

TEST(Ensembles, KindNames) {
    EXPECT_EQ(EnsembleSpec::complete(4).kind_name(), "complete");
    EXPECT_EQ(EnsembleSpec::erdos_renyi(4, 0.5, 0).kind_name(), "erdos_renyi");
    EXPECT_EQ(EnsembleSpec::sbm(4, 0.5, 0.5, 0).kind_name(), "sbm");
    EXPECT_EQ(EnsembleSpec::complete_bipartite(2, 3).kind_name(), "complete_bipartite");
    EXPECT_EQ(EnsembleSpec::star_union(2).kind_name(), "star_union");
    EXPECT_EQ(EnsembleSpec::coexistence(4, 0).kind_name(), "coexistence");
}

}  // namespace
