#pragma once

// Exact motif counts feeding the fourth-moment formula and the C4 normality
// criterion, plus the brute-force subgraph-count oracles and the fractional
// stable number gamma(H).
//
// Production counting is closed-form and runs in roughly O(sum of squared
// degrees). The oracles enumerate edge subsets / ordered edge tuples and are
// deliberately capped at toy sizes; tests assert the closed forms against
// them so the combinatorial coefficients are verified, never assumed.

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qflimit/errors.hpp"
#include "qflimit/graph.hpp"

namespace qflimit {

struct MotifCounts {
    std::uint64_t edges = 0;               // N(K_2, G) = |E|
    std::uint64_t cherries = 0;            // N(K_{1,2}, G)
    std::uint64_t four_cycles = 0;         // N(C_4, G)
    std::uint64_t triangles = 0;           // N(K_3, G)
    std::uint64_t disjoint_edge_pairs = 0; // N(K_2 ⊔ K_2, G)
    std::uint64_t closed_walks_4 = 0;      // tr(A^4)

    nlohmann::json to_json() const {
        return {{"edges", edges},
                {"cherries", cherries},
                {"four_cycles", four_cycles},
                {"triangles", triangles},
                {"disjoint_edge_pairs", disjoint_edge_pairs},
                {"closed_walks_4", closed_walks_4}};
    }
};

/// Exact rational with denominator two (fractional stable numbers are
/// half-integral).
struct HalfRational {
    long long twice = 0;
    double value() const { return 0.5 * static_cast<double>(twice); }
};

/// Closed-form motif counting:
///   cherries            = sum_v C(d_v, 2)
///   triangles           = (1/3) sum_{u<v adjacent} codeg(u,v)
///   four_cycles         = (1/2) sum_{u<v} C(codeg(u,v), 2)
///   closed_walks_4      = sum_v d_v^2 + sum_{u != v} codeg(u,v)^2
///   disjoint_edge_pairs = C(|E|, 2) - cherries
/// The fractional coefficients are locked in by oracle-equivalence tests.
inline MotifCounts count_motifs(const Graph& g) {
    const auto n = static_cast<std::size_t>(g.n());
    const auto& off = g.csr_offsets();
    const auto& adj = g.csr_neighbors();
    MotifCounts out;
    out.edges = g.edge_count();

    std::uint64_t sum_d_sq = 0;
    for (std::size_t v = 0; v < n; ++v) {
        const std::uint64_t d = off[v + 1] - off[v];
        sum_d_sq += d * d;
        out.cherries += d * (d - 1) / 2;
    }

    // One scatter pass per vertex u over the two-step frontier {v > u}.
    std::vector<std::uint32_t> codeg(n, 0);
    std::vector<std::uint32_t> touched;
    std::vector<std::uint8_t> is_neighbor(n, 0);
    std::uint64_t sum_codeg_sq = 0;       // over unordered pairs u < v
    std::uint64_t c4_pairs_twice = 0;     // sum_{u<v} C(codeg, 2)
    std::uint64_t triangle_thirds = 0;    // sum over adjacent u<v of codeg
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t k = off[u]; k < off[u + 1]; ++k) is_neighbor[adj[k]] = 1;
        for (std::size_t k = off[u]; k < off[u + 1]; ++k) {
            const std::uint32_t w = adj[k];
            for (std::size_t k2 = off[w]; k2 < off[w + 1]; ++k2) {
                const std::uint32_t v = adj[k2];
                if (v <= u) continue;
                if (codeg[v] == 0) touched.push_back(v);
                ++codeg[v];
            }
        }
        for (const std::uint32_t v : touched) {
            const std::uint64_t c = codeg[v];
            sum_codeg_sq += c * c;
            c4_pairs_twice += c * (c - 1) / 2;
            if (is_neighbor[v]) triangle_thirds += c;
            codeg[v] = 0;
        }
        touched.clear();
        for (std::size_t k = off[u]; k < off[u + 1]; ++k) is_neighbor[adj[k]] = 0;
    }

    out.triangles = triangle_thirds / 3;
    out.four_cycles = c4_pairs_twice / 2;
    out.closed_walks_4 = sum_d_sq + 2 * sum_codeg_sq;
    const std::uint64_t m = out.edges;
    out.disjoint_edge_pairs = m * (m - 1) / 2 - out.cherries;
    return out;
}

/// A multigraph on at most 12 vertices: no self-loops, repeated edges allowed.
class SmallMultigraph {
  public:
    static constexpr std::size_t kMaxVertices = 12;

    /// Build from 1-based endpoint pairs; labels are compacted to 1..k in
    /// order of first appearance unless `vertex_count` forces extra isolated
    /// vertices at the end.
    static SmallMultigraph from_edges(const std::vector<std::pair<int, int>>& edges,
                                      std::size_t vertex_count = 0) {
        SmallMultigraph h;
        std::vector<int> labels;
        auto compact = [&](int raw) -> std::uint8_t {
            for (std::size_t i = 0; i < labels.size(); ++i)
                if (labels[i] == raw) return static_cast<std::uint8_t>(i);
            labels.push_back(raw);
            if (labels.size() > kMaxVertices) {
                throw TooLargeForOracle("multigraph exceeds " +
                                        std::to_string(kMaxVertices) + " vertices");
            }
            return static_cast<std::uint8_t>(labels.size() - 1);
        };
        for (const auto& [a, b] : edges) {
            if (a == b) throw SelfLoop("multigraph edge (" + std::to_string(a) + "," +
                                       std::to_string(b) + ") is a self-loop");
            std::uint8_t u = compact(a);
            std::uint8_t v = compact(b);
            if (u > v) std::swap(u, v);
            h.edges_.emplace_back(u, v);
        }
        h.nv_ = labels.size();
        if (vertex_count > 0) {
            if (vertex_count < h.nv_) {
                throw InvalidParameter("vertex_count below the number of labeled endpoints");
            }
            if (vertex_count > kMaxVertices) {
                throw TooLargeForOracle("multigraph exceeds " +
                                        std::to_string(kMaxVertices) + " vertices");
            }
            h.nv_ = vertex_count;
        }
        std::sort(h.edges_.begin(), h.edges_.end());
        return h;
    }

    static SmallMultigraph single_edge() { return from_edges({{1, 2}}); }
    static SmallMultigraph doubled_edge() { return from_edges({{1, 2}, {1, 2}}); }
    static SmallMultigraph cherry() { return from_edges({{1, 2}, {2, 3}}); }
    static SmallMultigraph triangle() { return from_edges({{1, 2}, {2, 3}, {1, 3}}); }
    static SmallMultigraph four_cycle() {
        return from_edges({{1, 2}, {2, 3}, {3, 4}, {1, 4}});
    }
    static SmallMultigraph two_disjoint_edges() { return from_edges({{1, 2}, {3, 4}}); }
    static SmallMultigraph star(std::size_t leaves) {
        std::vector<std::pair<int, int>> es;
        for (std::size_t l = 0; l < leaves; ++l)
            es.emplace_back(1, static_cast<int>(l) + 2);
        return from_edges(es);
    }
    static SmallMultigraph complete(std::size_t k) {
        std::vector<std::pair<int, int>> es;
        for (std::size_t u = 1; u <= k; ++u)
            for (std::size_t v = u + 1; v <= k; ++v)
                es.emplace_back(static_cast<int>(u), static_cast<int>(v));
        return from_edges(es);
    }

    std::size_t vertex_count() const { return nv_; }
    std::size_t edge_count() const { return edges_.size(); }  // with multiplicity
    const std::vector<std::pair<std::uint8_t, std::uint8_t>>& edge_multiset() const {
        return edges_;
    }

    bool is_simple() const {
        for (std::size_t i = 1; i < edges_.size(); ++i)
            if (edges_[i] == edges_[i - 1]) return false;
        return true;
    }

    bool has_isolated_vertex() const {
        std::vector<std::uint8_t> seen(nv_, 0);
        for (const auto& [u, v] : edges_) seen[u] = seen[v] = 1;
        for (std::size_t v = 0; v < nv_; ++v)
            if (!seen[v]) return true;
        return false;
    }

    SmallMultigraph simplification() const {
        SmallMultigraph h = *this;
        h.edges_.erase(std::unique(h.edges_.begin(), h.edges_.end()), h.edges_.end());
        return h;
    }

    /// Degree counting edge multiplicity; 0-based vertex index.
    std::size_t degree(std::size_t v) const {
        std::size_t d = 0;
        for (const auto& [a, b] : edges_) d += (a == v) + (b == v);
        return d;
    }

    std::vector<std::size_t> sorted_degree_sequence() const {
        std::vector<std::size_t> ds(nv_);
        for (std::size_t v = 0; v < nv_; ++v) ds[v] = degree(v);
        std::sort(ds.begin(), ds.end());
        return ds;
    }

    /// Multiplicity-aware adjacency matrix (kMaxVertices^2, row-major).
    std::array<std::uint8_t, kMaxVertices * kMaxVertices> multiplicity_matrix() const {
        std::array<std::uint8_t, kMaxVertices * kMaxVertices> mat{};
        for (const auto& [u, v] : edges_) {
            ++mat[u * kMaxVertices + v];
            ++mat[v * kMaxVertices + u];
        }
        return mat;
    }

  private:
    std::size_t nv_ = 0;
    std::vector<std::pair<std::uint8_t, std::uint8_t>> edges_;  // normalized u<v, sorted
};

namespace detail {

/// Multiplicity-preserving isomorphism test via degree-pruned backtracking.
inline bool multigraphs_isomorphic(const SmallMultigraph& a, const SmallMultigraph& b) {
    const std::size_t n = a.vertex_count();
    if (n != b.vertex_count() || a.edge_count() != b.edge_count()) return false;
    if (a.sorted_degree_sequence() != b.sorted_degree_sequence()) return false;
    const auto ma = a.multiplicity_matrix();
    const auto mb = b.multiplicity_matrix();
    constexpr std::size_t W = SmallMultigraph::kMaxVertices;

    std::array<int, W> map{};     // a-vertex -> b-vertex
    std::array<bool, W> used{};
    map.fill(-1);

    std::vector<std::size_t> deg_a(n), deg_b(n);
    for (std::size_t v = 0; v < n; ++v) {
        deg_a[v] = a.degree(v);
        deg_b[v] = b.degree(v);
    }

    const auto backtrack = [&](auto&& self, std::size_t next) -> bool {
        if (next == n) return true;
        for (std::size_t cand = 0; cand < n; ++cand) {
            if (used[cand] || deg_a[next] != deg_b[cand]) continue;
            bool ok = true;
            for (std::size_t prev = 0; prev < next && ok; ++prev) {
                if (ma[next * W + prev] != mb[cand * W + static_cast<std::size_t>(map[prev])])
                    ok = false;
            }
            if (!ok) continue;
            map[next] = static_cast<int>(cand);
            used[cand] = true;
            if (self(self, next + 1)) return true;
            used[cand] = false;
            map[next] = -1;
        }
        return false;
    };
    return backtrack(backtrack, 0);
}

inline void require_oracle_scale(const SmallMultigraph& h, const Graph& g,
                                 const char* who) {
    if (g.n() > 10) {
        throw TooLargeForOracle(std::string(who) + ": oracle capped at 10 vertices, got n = " +
                                std::to_string(g.n()));
    }
    if (h.edge_count() > 4) {
        throw TooLargeForOracle(std::string(who) +
                                ": oracle capped at 4 motif edges, got " +
                                std::to_string(h.edge_count()));
    }
    if (h.edge_count() == 0) {
        throw InvalidParameter(std::string(who) + ": motif has no edges");
    }
    if (h.has_isolated_vertex()) {
        throw InvalidParameter(std::string(who) +
                               ": motif has isolated vertices; edge-subset counts are "
                               "defined for motifs without them");
    }
}

}  // namespace detail

/// Oracle N(H, G): number of edge subsets S of G with G[S] isomorphic to H
/// (H must be simple). Exhaustive; capped at toy sizes.
inline std::uint64_t brute_force_count(const SmallMultigraph& h, const Graph& g) {
    detail::require_oracle_scale(h, g, "brute_force_count");
    if (!h.is_simple()) {
        throw InvalidParameter("brute_force_count: N(H,G) takes a simple motif; "
                               "use brute_force_count_ordered for multigraphs");
    }
    const auto edges = g.edge_pairs();  // 1-based
    const std::size_t m = edges.size();
    const std::size_t k = h.edge_count();
    if (k > m) return 0;

    std::uint64_t count = 0;
    std::vector<std::size_t> pick(k);
    std::vector<std::pair<int, int>> subset(k);
    const auto recurse = [&](auto&& self, std::size_t depth, std::size_t start) -> void {
        if (depth == k) {
            for (std::size_t i = 0; i < k; ++i) {
                subset[i] = {static_cast<int>(edges[pick[i]].first),
                             static_cast<int>(edges[pick[i]].second)};
            }
            if (detail::multigraphs_isomorphic(SmallMultigraph::from_edges(subset), h))
                ++count;
            return;
        }
        for (std::size_t e = start; e + (k - depth) <= m; ++e) {
            pick[depth] = e;
            self(self, depth + 1, e + 1);
        }
    };
    recurse(recurse, 0, 0);
    return count;
}

/// Oracle M(H, G): number of ordered tuples (e_1,...,e_k) in E(G)^k whose
/// multigraph union is isomorphic to H. Exhaustive; capped at toy sizes.
inline std::uint64_t brute_force_count_ordered(const SmallMultigraph& h, const Graph& g) {
    detail::require_oracle_scale(h, g, "brute_force_count_ordered");
    const auto edges = g.edge_pairs();
    const std::size_t m = edges.size();
    const std::size_t k = h.edge_count();

    std::uint64_t count = 0;
    std::vector<std::size_t> pick(k);
    std::vector<std::pair<int, int>> tuple(k);
    const auto recurse = [&](auto&& self, std::size_t depth) -> void {
        if (depth == k) {
            for (std::size_t i = 0; i < k; ++i) {
                tuple[i] = {static_cast<int>(edges[pick[i]].first),
                            static_cast<int>(edges[pick[i]].second)};
            }
            if (detail::multigraphs_isomorphic(SmallMultigraph::from_edges(tuple), h))
                ++count;
            return;
        }
        for (std::size_t e = 0; e < m; ++e) {
            pick[depth] = e;
            self(self, depth + 1);
        }
    };
    recurse(recurse, 0);
    return count;
}

/// gamma(H): maximize sum phi(v) over phi in {0, 1/2, 1}^V subject to
/// phi(u) + phi(v) <= 1 on every edge. Half-integrality of the underlying LP
/// makes the ternary exhaustive search exact.
inline HalfRational fractional_stable_number(const SmallMultigraph& h) {
    const std::size_t n = h.vertex_count();
    if (n > SmallMultigraph::kMaxVertices) {
        throw TooLargeForOracle("fractional_stable_number capped at 12 vertices");
    }
    if (n == 0) return {0};
    const auto simple = h.simplification().edge_multiset();

    std::vector<int> phi_twice(n, 0);  // each in {0, 1, 2}
    long long best = 0;
    const auto recurse = [&](auto&& self, std::size_t v, long long sum) -> void {
        if (v == n) {
            best = std::max(best, sum);
            return;
        }
        for (int val = 2; val >= 0; --val) {
            phi_twice[v] = val;
            bool feasible = true;
            for (const auto& [a, b] : simple) {
                if (b == v && phi_twice[a] + val > 2) {
                    feasible = false;
                    break;
                }
            }
            if (feasible) self(self, v + 1, sum + val);
        }
        phi_twice[v] = 0;
    };
    recurse(recurse, 0, 0);
    return {best};
}

/// N(h, g) / |E(g)|^{gamma(h)}, the ratio that stays bounded over all graphs
/// g. Recognizes the closed-form motifs so it works at scale; anything
/// else goes through the oracle (and inherits its caps).
inline double alon_bound_ratio(const SmallMultigraph& h, const Graph& g) {
    if (!h.is_simple()) {
        throw InvalidParameter("alon_bound_ratio: motif must be simple");
    }
    const double gamma = fractional_stable_number(h).value();
    const double m = static_cast<double>(g.edge_count());
    double count = 0.0;
    if (detail::multigraphs_isomorphic(h, SmallMultigraph::single_edge())) {
        count = static_cast<double>(g.edge_count());
    } else if (detail::multigraphs_isomorphic(h, SmallMultigraph::cherry())) {
        count = static_cast<double>(count_motifs(g).cherries);
    } else if (detail::multigraphs_isomorphic(h, SmallMultigraph::triangle())) {
        count = static_cast<double>(count_motifs(g).triangles);
    } else if (detail::multigraphs_isomorphic(h, SmallMultigraph::four_cycle())) {
        count = static_cast<double>(count_motifs(g).four_cycles);
    } else if (detail::multigraphs_isomorphic(h, SmallMultigraph::two_disjoint_edges())) {
        count = static_cast<double>(count_motifs(g).disjoint_edge_pairs);
    } else {
        count = static_cast<double>(brute_force_count(h, g));
    }
    return count / std::pow(m, gamma);
}

}  // namespace qflimit
