#pragma once

// Degree-ordered simple undirected graph.
//
// Vertices are labeled 1..n with d_1 >= d_2 >= ... >= d_n; ties are broken by
// the original (input) label, ascending, via a stable sort. The relabeling map
// is retained so estimates can be reported against input identities. The
// adjacency structure is CSR-style sorted neighbor lists; the edge list is
// additionally kept as a flat 0-based array because the Monte Carlo statistic
// is a single tight pass over it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qflimit/errors.hpp"

namespace qflimit {

class Graph {
  public:
    /// Build from 1-based vertex pairs, validating and relabeling into degree
    /// order. min_vertex_count lets callers preserve trailing isolated
    /// vertices that the pair list alone cannot express.
    static Graph from_edge_list(const std::vector<std::pair<long long, long long>>& pairs,
                                long long min_vertex_count = 0) {
        long long n = min_vertex_count;
        for (const auto& [u, v] : pairs) {
            if (u < 1 || v < 1) {
                throw InvalidParameter("vertex labels must be positive integers, got (" +
                                       std::to_string(u) + "," + std::to_string(v) + ")");
            }
            if (u == v) throw SelfLoop("self-loop at vertex " + std::to_string(u));
            n = std::max({n, u, v});
        }
        if (pairs.empty()) throw EmptyGraph("edge list is empty; |E| must be positive");
        if (n > std::numeric_limits<std::uint32_t>::max() - 2) {
            throw TooLarge("vertex count exceeds supported range");
        }

        // Normalize to (min,max), sort, reject duplicates.
        std::vector<std::pair<std::uint32_t, std::uint32_t>> es;
        es.reserve(pairs.size());
        for (const auto& [u, v] : pairs) {
            es.emplace_back(static_cast<std::uint32_t>(std::min(u, v)),
                            static_cast<std::uint32_t>(std::max(u, v)));
        }
        std::sort(es.begin(), es.end());
        for (std::size_t i = 1; i < es.size(); ++i) {
            if (es[i] == es[i - 1]) {
                throw DuplicateEdge("duplicate edge (" + std::to_string(es[i].first) + "," +
                                    std::to_string(es[i].second) + ")");
            }
        }

        // Degrees under original labels, then the degree-ordering permutation:
        // stable sort by (degree descending, original label ascending).
        const auto nn = static_cast<std::uint32_t>(n);
        std::vector<std::uint32_t> deg(nn, 0);
        for (const auto& [u, v] : es) {
            ++deg[u - 1];
            ++deg[v - 1];
        }
        std::vector<std::uint32_t> order(nn);  // order[new0] = orig0
        for (std::uint32_t i = 0; i < nn; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&deg](std::uint32_t a, std::uint32_t b) { return deg[a] > deg[b]; });
        std::vector<std::uint32_t> new_of(nn);  // new_of[orig0] = new0
        for (std::uint32_t i = 0; i < nn; ++i) new_of[order[i]] = i;

        Graph g;
        g.n_ = static_cast<int>(nn);
        g.orig_label_.resize(nn);
        for (std::uint32_t i = 0; i < nn; ++i) g.orig_label_[i] = order[i] + 1;
        g.flat_edges_.reserve(2 * es.size());
        for (const auto& [u, v] : es) {
            std::uint32_t a = new_of[u - 1];
            std::uint32_t b = new_of[v - 1];
            if (a > b) std::swap(a, b);
            g.flat_edges_.push_back(a);
            g.flat_edges_.push_back(b);
        }
        g.sort_edges_and_build();
        return g;
    }

    int n() const noexcept { return n_; }
    std::uint64_t edge_count() const noexcept { return flat_edges_.size() / 2; }

    /// Degree of 1-based vertex v.
    std::uint32_t degree(int v) const {
        check_vertex(v);
        return degrees_[static_cast<std::size_t>(v) - 1];
    }
    /// Degrees indexed by new label minus one (so degrees()[0] = d_1).
    const std::vector<std::uint32_t>& degrees() const noexcept { return degrees_; }

    /// Input label that the 1-based vertex v carried before degree ordering.
    int original_label(int v) const {
        check_vertex(v);
        return static_cast<int>(orig_label_[static_cast<std::size_t>(v) - 1]);
    }

    /// Flat 0-based endpoint array: entries (2i, 2i+1) are the i-th edge with
    /// u < v; edges sorted lexicographically. This is the Monte Carlo hot path.
    const std::vector<std::uint32_t>& flat_edges() const noexcept { return flat_edges_; }

    /// 1-based (u,v) pairs with u < v, lexicographically sorted.
    std::vector<std::pair<int, int>> edge_pairs() const {
        std::vector<std::pair<int, int>> out;
        out.reserve(edge_count());
        for (std::size_t i = 0; i + 1 < flat_edges_.size(); i += 2) {
            out.emplace_back(static_cast<int>(flat_edges_[i]) + 1,
                             static_cast<int>(flat_edges_[i + 1]) + 1);
        }
        return out;
    }

    /// CSR access (0-based ids, neighbors sorted ascending) for counting code.
    const std::vector<std::uint64_t>& csr_offsets() const noexcept { return offsets_; }
    const std::vector<std::uint32_t>& csr_neighbors() const noexcept { return adj_; }

    /// Sorted neighbor list of a 1-based vertex, as 1-based ids.
    std::vector<int> neighbors(int v) const {
        check_vertex(v);
        std::vector<int> out;
        const std::size_t v0 = static_cast<std::size_t>(v) - 1;
        out.reserve(offsets_[v0 + 1] - offsets_[v0]);
        for (std::uint64_t i = offsets_[v0]; i < offsets_[v0 + 1]; ++i) {
            out.push_back(static_cast<int>(adj_[i]) + 1);
        }
        return out;
    }

    bool adjacent(int u, int v) const {
        check_vertex(u);
        check_vertex(v);
        if (u == v) return false;
        const std::size_t u0 = static_cast<std::size_t>(u) - 1;
        const auto b = adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[u0]);
        const auto e = adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[u0 + 1]);
        return std::binary_search(b, e, static_cast<std::uint32_t>(v - 1));
    }

    /// Number of common neighbors Sum_v a_{s,v} a_{v,t}; codegree(s,s) = d_s.
    std::uint64_t codegree(int s, int t) const {
        check_vertex(s);
        check_vertex(t);
        if (s == t) return degrees_[static_cast<std::size_t>(s) - 1];
        const std::size_t s0 = static_cast<std::size_t>(s) - 1;
        const std::size_t t0 = static_cast<std::size_t>(t) - 1;
        std::uint64_t i = offsets_[s0], j = offsets_[t0], c = 0;
        const std::uint64_t ie = offsets_[s0 + 1], je = offsets_[t0 + 1];
        while (i < ie && j < je) {
            if (adj_[i] < adj_[j]) {
                ++i;
            } else if (adj_[i] > adj_[j]) {
                ++j;
            } else {
                ++c;
                ++i;
                ++j;
            }
        }
        return c;
    }

    /// Induced subgraph on vertices K+1..n (the K-truncated graph), relabeled
    /// 1..n-K preserving the surviving vertices' relative order. The result is
    /// NOT re-sorted by its own degrees, and may have no edges at all.
    Graph truncated(int K) const {
        if (K < 0 || K >= n_) {
            throw IndexOutOfRange("truncation level K=" + std::to_string(K) +
                                  " outside [0," + std::to_string(n_ - 1) + "]");
        }
        Graph g;
        g.n_ = n_ - K;
        const auto k = static_cast<std::uint32_t>(K);
        g.orig_label_.assign(orig_label_.begin() + K, orig_label_.end());
        g.flat_edges_.reserve(flat_edges_.size());
        for (std::size_t i = 0; i + 1 < flat_edges_.size(); i += 2) {
            const std::uint32_t u = flat_edges_[i], v = flat_edges_[i + 1];
            if (u >= k && v >= k) {
                g.flat_edges_.push_back(u - k);
                g.flat_edges_.push_back(v - k);
            }
        }
        g.sort_edges_and_build();
        return g;
    }

  private:
    Graph() = default;

    void check_vertex(int v) const {
        if (v < 1 || v > n_) {
            throw IndexOutOfRange("vertex " + std::to_string(v) + " outside [1," +
                                  std::to_string(n_) + "]");
        }
    }

    // Sort the flat edge array lexicographically and derive degrees + CSR.
    void sort_edges_and_build() {
        const std::size_t m = flat_edges_.size() / 2;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> es(m);
        for (std::size_t i = 0; i < m; ++i) es[i] = {flat_edges_[2 * i], flat_edges_[2 * i + 1]};
        std::sort(es.begin(), es.end());
        for (std::size_t i = 0; i < m; ++i) {
            flat_edges_[2 * i] = es[i].first;
            flat_edges_[2 * i + 1] = es[i].second;
        }
        const auto nn = static_cast<std::size_t>(n_);
        degrees_.assign(nn, 0);
        for (const auto& [u, v] : es) {
            ++degrees_[u];
            ++degrees_[v];
        }
        offsets_.assign(nn + 1, 0);
        for (std::size_t v = 0; v < nn; ++v) offsets_[v + 1] = offsets_[v] + degrees_[v];
        adj_.resize(2 * m);
        std::vector<std::uint64_t> cursor(offsets_.begin(), offsets_.end() - 1);
        for (const auto& [u, v] : es) {
            adj_[cursor[u]++] = v;
            adj_[cursor[v]++] = u;
        }
        for (std::size_t v = 0; v < nn; ++v) {
            std::sort(adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]),
                      adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]));
        }
    }

    int n_ = 0;
    std::vector<std::uint32_t> flat_edges_;
    std::vector<std::uint32_t> degrees_;
    std::vector<std::uint64_t> offsets_;
    std::vector<std::uint32_t> adj_;
    std::vector<std::uint32_t> orig_label_;
};

/// Free-function spelling of Graph::truncated.
inline Graph truncated_graph(const Graph& g, int K) { return g.truncated(K); }

/// The three-way vertex split [1,K1], (K1, K2*sqrt(|E|)], (K2*sqrt(|E|), n]
/// used for reporting. Ranges are inclusive; lo > hi encodes empty.
struct VertexPartition {
    struct Range {
        int lo = 1, hi = 0;
        bool empty() const noexcept { return lo > hi; }
        int size() const noexcept { return empty() ? 0 : hi - lo + 1; }
    };
    double K1 = 1.0, K2 = 1.0;
    Range V1, V2, V3;
};

inline VertexPartition partition(const Graph& g, double K1, double K2) {
    if (!(K1 >= 1.0) || !(K2 >= 1.0)) {
        throw InvalidThreshold("partition thresholds must satisfy K1 >= 1 and K2 >= 1");
    }
    const int n = g.n();
    const double m = static_cast<double>(g.edge_count());
    const int a = static_cast<int>(std::min<double>(n, std::floor(K1)));
    // Clamp so the three ranges always form a disjoint cover of {1..n}.
    const int b = static_cast<int>(
        std::min<double>(n, std::max<double>(a, std::floor(K2 * std::sqrt(m)))));
    VertexPartition p;
    p.K1 = K1;
    p.K2 = K2;
    p.V1 = {1, a};
    p.V2 = {a + 1, b};
    p.V3 = {b + 1, n};
    return p;
}

// ---- edge-list text I/O ------------------------------------------------------
//
// Format: one edge per line, "u v" with 1-based positive integers; '#' starts a
// comment; blank lines are ignored. The writer additionally emits a leading
// "# vertices N" comment which the reader honors, so graphs whose trailing
// vertices are isolated (degree ordering puts every isolated vertex last)
// survive a round trip. Files without the directive parse unchanged.

inline Graph read_edge_list(std::istream& in) {
    std::vector<std::pair<long long, long long>> pairs;
    long long declared_n = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string body = line;
        if (const auto hash = body.find('#'); hash != std::string::npos) {
            // "# vertices N" directive; anything else after '#' is commentary.
            std::istringstream cs(body.substr(hash + 1));
            std::string word;
            if (cs >> word && word == "vertices") {
                long long nv = 0;
                if (cs >> nv && nv > 0) declared_n = std::max(declared_n, nv);
            }
            body = body.substr(0, hash);
        }
        std::istringstream ls(body);
        long long u = 0, v = 0;
        if (!(ls >> u)) {
            if (body.find_first_not_of(" \t\r\n\v\f") != std::string::npos) {
                throw ParseError("edge list line " + std::to_string(lineno) +
                                 ": expected exactly two integers, got '" + line + "'");
            }
            continue;  // blank or comment-only line
        }
        std::string trailing;
        if (!(ls >> v) || (ls >> trailing)) {
            throw ParseError("edge list line " + std::to_string(lineno) +
                             ": expected exactly two integers, got '" + line + "'");
        }
        if (u < 1 || v < 1) {
            throw ParseError("edge list line " + std::to_string(lineno) +
                             ": vertex labels must be positive, got '" + line + "'");
        }
        pairs.emplace_back(u, v);
    }
    if (pairs.empty()) throw EmptyGraph("edge list contains no edges");
    try {
        return Graph::from_edge_list(pairs, declared_n);
    } catch (const Error& e) {
        throw ParseError(std::string("invalid edge list: ") + e.what());
    }
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
    out << "# vertices " << g.n() << "\n";
    out << "# edges " << g.edge_count() << "\n";
    const auto& fe = g.flat_edges();
    for (std::size_t i = 0; i + 1 < fe.size(); i += 2) {
        out << fe[i] + 1 << " " << fe[i + 1] + 1 << "\n";
    }
}

inline Graph read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open edge list file: " + path);
    return read_edge_list(in);
}

inline void write_edge_list_file(const std::string& path, const Graph& g) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_edge_list(out, g);
    if (!out.good()) throw IoError("write failed: " + path);
}

}  // namespace qflimit
