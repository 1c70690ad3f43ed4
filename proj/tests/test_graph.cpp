// Graph construction, degree ordering, truncation, co-degrees, and edge-list
// I/O. Brute-force recomputations on random graphs serve as the oracle.

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>
#include <vector>

#include "qflimit/graph.hpp"

namespace {

using namespace qflimit;
using EdgeList = std::vector<std::pair<long long, long long>>;

Graph make(const EdgeList& es, long long min_n = 0) {
    return Graph::from_edge_list(es, min_n);
}

EdgeList random_edges(std::mt19937_64& mt, int n, double p) {
    EdgeList es;
    for (int u = 1; u <= n; ++u) {
        for (int v = u + 1; v <= n; ++v) {
            if (std::uniform_real_distribution<double>(0, 1)(mt) < p) es.emplace_back(u, v);
        }
    }
    if (es.empty()) es.emplace_back(1, 2);
    return es;
}

TEST(Graph, DegreesSortedDescending) {
    std::mt19937_64 mt(11);
    for (int rep = 0; rep < 30; ++rep) {
        const Graph g = make(random_edges(mt, 20, 0.3));
        const auto& d = g.degrees();
        for (std::size_t i = 1; i < d.size(); ++i) EXPECT_GE(d[i - 1], d[i]);
    }
}

TEST(Graph, TieBreakByOriginalLabel) {
    // Path 1-2-3-4: degrees (1,2,2,1). Ties among {2,3} and {1,4} must keep
    // original-label order (stable sort).
    const Graph g = make({{1, 2}, {2, 3}, {3, 4}});
    EXPECT_EQ(g.original_label(1), 2);
    EXPECT_EQ(g.original_label(2), 3);
    EXPECT_EQ(g.original_label(3), 1);
    EXPECT_EQ(g.original_label(4), 4);
    EXPECT_EQ(g.degree(1), 2u);
    EXPECT_EQ(g.degree(3), 1u);
}

TEST(Graph, EdgeOrderInputInvariance) {
    // The same edge set in any input order produces the identical object.
    std::mt19937_64 mt(12);
    EdgeList es = random_edges(mt, 15, 0.4);
    const Graph a = make(es);
    std::shuffle(es.begin(), es.end(), mt);
    for (auto& e : es) {
        if (mt() % 2) std::swap(e.first, e.second);  // orientation-free input
    }
    const Graph b = make(es);
    EXPECT_EQ(a.flat_edges(), b.flat_edges());
    EXPECT_EQ(a.degrees(), b.degrees());
}

TEST(Graph, RelabelingInvariance) {
    // A vertex permutation yields an isomorphic graph: same degree sequence
    // and the same co-degree multiset.
    std::mt19937_64 mt(13);
    const int n = 12;
    EdgeList es = random_edges(mt, n, 0.35);
    std::vector<long long> perm(n + 1);
    for (int i = 1; i <= n; ++i) perm[i] = i;
    std::shuffle(perm.begin() + 1, perm.end(), mt);
    EdgeList es2;
    for (auto [u, v] : es) es2.emplace_back(perm[u], perm[v]);
    const Graph a = make(es, n), b = make(es2, n);
    EXPECT_EQ(a.degrees(), b.degrees());
    std::vector<std::uint64_t> ca, cb;
    for (int s = 1; s <= a.n(); ++s) {
        for (int t = s + 1; t <= a.n(); ++t) {
            ca.push_back(a.codegree(s, t));
            cb.push_back(b.codegree(s, t));
        }
    }
    std::sort(ca.begin(), ca.end());
    std::sort(cb.begin(), cb.end());
    EXPECT_EQ(ca, cb);
}

TEST(Graph, AdjacencyAndNeighborsAgainstBruteForce) {
    std::mt19937_64 mt(14);
    const EdgeList es = random_edges(mt, 18, 0.3);
    const Graph g = make(es, 18);
    // Rebuild adjacency in original labels, then map through the ordering.
    std::vector<std::vector<bool>> adj(19, std::vector<bool>(19, false));
    for (auto [u, v] : es) adj[u][v] = adj[v][u] = true;
    for (int s = 1; s <= g.n(); ++s) {
        for (int t = 1; t <= g.n(); ++t) {
            if (s == t) continue;
            EXPECT_EQ(g.adjacent(s, t), adj[g.original_label(s)][g.original_label(t)]);
        }
        std::uint64_t deg = 0;
        for (int t = 1; t <= 18; ++t) deg += adj[g.original_label(s)][t];
        EXPECT_EQ(g.degree(s), deg);
        EXPECT_EQ(g.neighbors(s).size(), deg);
    }
}

TEST(Graph, CodegreeDiagonalIsDegreeAndSumIdentity) {
    std::mt19937_64 mt(15);
    const Graph g = make(random_edges(mt, 16, 0.4), 16);
    std::uint64_t sum_cod = 0, sum_d2 = 0;
    for (int s = 1; s <= g.n(); ++s) {
        EXPECT_EQ(g.codegree(s, s), g.degree(s));
        sum_d2 += static_cast<std::uint64_t>(g.degree(s)) * g.degree(s);
        for (int t = 1; t <= g.n(); ++t) {
            if (t != s) sum_cod += g.codegree(s, t);
        }
    }
    // sum over ordered pairs s != t of codeg = sum_w d_w (d_w - 1)
    std::uint64_t rhs = 0;
    for (int w = 1; w <= g.n(); ++w) {
        rhs += static_cast<std::uint64_t>(g.degree(w)) * (g.degree(w) - 1);
    }
    EXPECT_EQ(sum_cod, rhs);
    EXPECT_GT(sum_d2, 0u);
}

TEST(Graph, CodegreeAgainstBruteForce) {
    std::mt19937_64 mt(16);
    const Graph g = make(random_edges(mt, 14, 0.45), 14);
    for (int s = 1; s <= g.n(); ++s) {
        for (int t = s + 1; t <= g.n(); ++t) {
            std::uint64_t c = 0;
            for (int w = 1; w <= g.n(); ++w) {
                if (w != s && w != t && g.adjacent(s, w) && g.adjacent(t, w)) ++c;
            }
            EXPECT_EQ(g.codegree(s, t), c);
            EXPECT_EQ(g.codegree(t, s), c);
        }
    }
}

TEST(Graph, TruncationRemovesTopDegrees) {
    std::mt19937_64 mt(17);
    for (int rep = 0; rep < 10; ++rep) {
        const Graph g = make(random_edges(mt, 20, 0.3), 20);
        for (int K : {1, 3, 7}) {
            if (K >= g.n()) continue;
            const Graph gk = truncated_graph(g, K);
            EXPECT_EQ(gk.n(), g.n() - K);
            // Edge count: edges of g with both endpoints beyond rank K.
            std::uint64_t want = 0;
            const auto& fe = g.flat_edges();
            for (std::size_t i = 0; i < fe.size(); i += 2) {
                if (fe[i] >= static_cast<std::uint32_t>(K) &&
                    fe[i + 1] >= static_cast<std::uint32_t>(K)) {
                    ++want;
                }
            }
            EXPECT_EQ(gk.edge_count(), want);
        }
    }
}

TEST(Graph, TruncationPreservesRelativeOrder) {
    // K4 plus a pendant: removing the top vertex keeps the remaining ranks'
    // relative order (stable).
    const Graph g = make({{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}, {1, 5}});
    ASSERT_EQ(g.original_label(1), 1);  // degree 4 hub
    const Graph gk = truncated_graph(g, 1);
    EXPECT_EQ(gk.n(), 4);
    EXPECT_EQ(gk.edge_count(), 3u);  // triangle 2-3-4 survives
    const auto d = gk.degrees();
    EXPECT_EQ(d[0], 2u);
    EXPECT_EQ(d[3], 0u);  // the pendant became isolated but must remain
}

TEST(Graph, PartitionCoversVertexRange) {
    const Graph g = make({{1, 2}, {1, 3}, {1, 4}, {2, 3}});
    const VertexPartition p = partition(g, 1, 1.2);
    // V1 = top floor(K1) ranks; V2 up to floor(K2 sqrt(m)); V3 the rest —
    // a disjoint cover of 1..n.
    EXPECT_EQ(p.V1.lo, 1);
    EXPECT_EQ(p.V1.size(), 1);
    EXPECT_EQ(p.V2.lo, p.V1.hi + 1);
    EXPECT_EQ(p.V3.lo, p.V2.hi + 1);
    EXPECT_EQ(p.V3.hi, g.n());
    EXPECT_EQ(p.V1.size() + p.V2.size() + p.V3.size(), g.n());
    EXPECT_THROW(partition(g, 0.5, 1.0), InvalidThreshold);
    EXPECT_THROW(partition(g, 1.0, 0.0), InvalidThreshold);
}

TEST(Graph, EdgeListRoundTrip) {
    std::mt19937_64 mt(18);
    const Graph g = make(random_edges(mt, 25, 0.2), 25);
    std::ostringstream os;
    write_edge_list(os, g);
    std::istringstream is(os.str());
    const Graph h = read_edge_list(is);
    EXPECT_EQ(h.n(), g.n());
    EXPECT_EQ(h.edge_count(), g.edge_count());
    EXPECT_EQ(h.flat_edges(), g.flat_edges());
    EXPECT_EQ(h.degrees(), g.degrees());
}

TEST(Graph, VerticesDirectivePreservesIsolated) {
    std::istringstream is("# vertices 7\n1 2\n2 3\n");
    const Graph g = read_edge_list(is);
    EXPECT_EQ(g.n(), 7);
    EXPECT_EQ(g.edge_count(), 2u);
    EXPECT_EQ(g.degrees().back(), 0u);
}

TEST(Graph, Errors) {
    EXPECT_THROW(make({{1, 1}}), SelfLoop);
    EXPECT_THROW(make({{1, 2}, {2, 1}}), DuplicateEdge);
    EXPECT_THROW(make({{1, 2}, {1, 2}}), DuplicateEdge);
    EXPECT_THROW(make({}), EmptyGraph);
    EXPECT_THROW(make({{0, 2}}), InvalidParameter);
    EXPECT_THROW(make({{-3, 2}}), InvalidParameter);
    const Graph g = make({{1, 2}});
    EXPECT_THROW(g.degree(0), IndexOutOfRange);
    EXPECT_THROW(g.degree(3), IndexOutOfRange);
    EXPECT_THROW(truncated_graph(g, 2), IndexOutOfRange);
    std::istringstream bad("1 2\nfoo bar\n");
    EXPECT_THROW(read_edge_list(bad), ParseError);
    std::istringstream empty("# vertices 3\n");
    EXPECT_THROW(read_edge_list(empty), EmptyGraph);
    EXPECT_THROW(read_edge_list_file("/nonexistent/qflimit.edges"), IoError);
}

TEST(Graph, CsrConsistentWithEdges) {
    std::mt19937_64 mt(19);
    const Graph g = make(random_edges(mt, 15, 0.4), 15);
    const auto& off = g.csr_offsets();
    const auto& nb = g.csr_neighbors();
    ASSERT_EQ(off.size(), static_cast<std::size_t>(g.n()) + 1);
    EXPECT_EQ(nb.size(), 2 * g.edge_count());
    std::uint64_t halfedges = 0;
    for (int v = 1; v <= g.n(); ++v) {
        EXPECT_EQ(off[v] - off[v - 1], g.degree(v));
        halfedges += g.degree(v);
    }
    EXPECT_EQ(halfedges, 2 * g.edge_count());
}

}  // namespace
