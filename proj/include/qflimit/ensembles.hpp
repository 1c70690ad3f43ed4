#pragma once

// Seeded graph generators for the worked examples: complete graphs, dense and
// sparse Erdos-Renyi, two-block SBM, complete bipartite, geometric star
// unions, and the hub/dense/sparse coexistence construction.
//
// Random kinds draw every candidate pair in a fixed lexicographic order from a
// single child stream, so one seed pins the edge set exactly regardless of
// platform or thread count. All generators return degree-ordered Graphs.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qflimit/errors.hpp"
#include "qflimit/graph.hpp"
#include "qflimit/rng.hpp"

namespace qflimit {

enum class EnsembleKind {
    Complete,           // K_n
    ErdosRenyi,         // G(n, p)
    Sbm,                // two equal blocks, within p, across q
    CompleteBipartite,  // K_{a,n}
    StarUnion,          // disjoint stars K_{1,2^s}, s = 1..m
    Coexistence,        // hub + G(n,1/2) + G(n^2-n, 1/n^2) on n^2+1 vertices
};

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::Complete;
    long long n = 0;   // vertex-count parameter (meaning depends on kind)
    double p = 0.0;
    double q = 0.0;
    long long a = 0;   // small side of K_{a,n}
    long long m = 0;   // number of stars in StarUnion
    std::uint64_t seed = 0;

    static EnsembleSpec complete(long long n) {
        EnsembleSpec s;
        s.kind = EnsembleKind::Complete;
        s.n = n;
        return s;
    }
    static EnsembleSpec erdos_renyi(long long n, double p, std::uint64_t seed) {
        EnsembleSpec s;
        s.kind = EnsembleKind::ErdosRenyi;
        s.n = n;
        s.p = p;
        s.seed = seed;
        return s;
    }
    static EnsembleSpec sbm(long long n, double p, double q, std::uint64_t seed) {
        EnsembleSpec s;
        s.kind = EnsembleKind::Sbm;
        s.n = n;
        s.p = p;
        s.q = q;
        s.seed = seed;
        return s;
    }
    static EnsembleSpec complete_bipartite(long long a, long long n) {
        EnsembleSpec s;
        s.kind = EnsembleKind::CompleteBipartite;
        s.a = a;
        s.n = n;
        return s;
    }
    static EnsembleSpec star_union(long long m) {
        EnsembleSpec s;
        s.kind = EnsembleKind::StarUnion;
        s.m = m;
        return s;
    }
    static EnsembleSpec coexistence(long long n, std::uint64_t seed) {
        EnsembleSpec s;
        s.kind = EnsembleKind::Coexistence;
        s.n = n;
        s.seed = seed;
        return s;
    }

    std::string kind_name() const {
        switch (kind) {
            case EnsembleKind::Complete: return "complete";
            case EnsembleKind::ErdosRenyi: return "erdos_renyi";
            case EnsembleKind::Sbm: return "sbm";
            case EnsembleKind::CompleteBipartite: return "complete_bipartite";
            case EnsembleKind::StarUnion: return "star_union";
            case EnsembleKind::Coexistence: return "coexistence";
        }
        return "unknown";
    }

    void validate() const {
        auto check_prob = [](double v, const char* what) {
            if (!(v > 0.0 && v <= 1.0)) {
                throw InvalidParameter(std::string(what) + " must lie in (0,1], got " +
                                       std::to_string(v));
            }
        };
        switch (kind) {
            case EnsembleKind::Complete:
                if (n < 2) throw InvalidParameter("complete: n must be >= 2");
                break;
            case EnsembleKind::ErdosRenyi:
                if (n < 2) throw InvalidParameter("erdos_renyi: n must be >= 2");
                check_prob(p, "erdos_renyi: p");
                break;
            case EnsembleKind::Sbm:
                if (n < 2) throw InvalidParameter("sbm: n must be >= 2");
                if (n % 2 != 0) {
                    throw InvalidParameter("sbm: n must be even (two equal blocks)");
                }
                check_prob(p, "sbm: p");
                check_prob(q, "sbm: q");
                break;
            case EnsembleKind::CompleteBipartite:
                if (a < 1) throw InvalidParameter("complete_bipartite: a must be >= 1");
                if (n < 1) throw InvalidParameter("complete_bipartite: n must be >= 1");
                break;
            case EnsembleKind::StarUnion:
                if (m < 1) throw InvalidParameter("star_union: m must be >= 1");
                if (m > 24) throw InvalidParameter("star_union: m > 24 would be astronomically large");
                break;
            case EnsembleKind::Coexistence:
                if (n < 2) throw InvalidParameter("coexistence: n must be >= 2");
                break;
        }
    }

    nlohmann::json to_json() const {
        nlohmann::json params;
        switch (kind) {
            case EnsembleKind::Complete: params = {{"n", n}}; break;
            case EnsembleKind::ErdosRenyi: params = {{"n", n}, {"p", p}}; break;
            case EnsembleKind::Sbm: params = {{"n", n}, {"p", p}, {"q", q}}; break;
            case EnsembleKind::CompleteBipartite: params = {{"a", a}, {"n", n}}; break;
            case EnsembleKind::StarUnion: params = {{"m", m}}; break;
            case EnsembleKind::Coexistence: params = {{"n", n}}; break;
        }
        return {{"kind", kind_name()}, {"params", params}, {"seed", seed}};
    }

    static EnsembleSpec from_json(const nlohmann::json& j) {
        if (!j.is_object() || !j.contains("kind") || !j.contains("params")) {
            throw ParseError("ensemble spec must be {\"kind\", \"params\", \"seed\"}");
        }
        const std::string kind = j.at("kind").get<std::string>();
        const auto& pr = j.at("params");
        EnsembleSpec s;
        try {
            if (kind == "complete") {
                s = complete(pr.at("n").get<long long>());
            } else if (kind == "erdos_renyi") {
                s = erdos_renyi(pr.at("n").get<long long>(), pr.at("p").get<double>(), 0);
            } else if (kind == "sbm") {
                s = sbm(pr.at("n").get<long long>(), pr.at("p").get<double>(),
                        pr.at("q").get<double>(), 0);
            } else if (kind == "complete_bipartite") {
                s = complete_bipartite(pr.at("a").get<long long>(), pr.at("n").get<long long>());
            } else if (kind == "star_union") {
                s = star_union(pr.at("m").get<long long>());
            } else if (kind == "coexistence") {
                s = coexistence(pr.at("n").get<long long>(), 0);
            } else {
                throw ParseError("unknown ensemble kind '" + kind + "'");
            }
            if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
            s.validate();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("malformed ensemble spec: ") + e.what());
        } catch (const InvalidParameter& e) {
            throw ParseError(std::string("invalid ensemble spec: ") + e.what());
        }
        return s;
    }
};

namespace detail {

inline void push_edge(std::vector<std::pair<long long, long long>>& es, long long u,
                      long long v) {
    es.emplace_back(u, v);
}

}  // namespace detail

/// Materialize the graph a spec describes. Same spec (including seed) gives a
/// bit-identical edge set.
inline Graph generate(const EnsembleSpec& spec) {
    spec.validate();
    std::vector<std::pair<long long, long long>> es;
    switch (spec.kind) {
        case EnsembleKind::Complete: {
            es.reserve(static_cast<std::size_t>(spec.n * (spec.n - 1) / 2));
            for (long long u = 1; u <= spec.n; ++u)
                for (long long v = u + 1; v <= spec.n; ++v) detail::push_edge(es, u, v);
            break;
        }
        case EnsembleKind::ErdosRenyi: {
            Rng rng(child_seed(spec.seed, "edges", 0));
            for (long long u = 1; u <= spec.n; ++u)
                for (long long v = u + 1; v <= spec.n; ++v)
                    if (rng.next_unit() < spec.p) detail::push_edge(es, u, v);
            break;
        }
        case EnsembleKind::Sbm: {
            Rng rng(child_seed(spec.seed, "edges", 0));
            const long long half = spec.n / 2;
            for (long long u = 1; u <= spec.n; ++u) {
                for (long long v = u + 1; v <= spec.n; ++v) {
                    const bool same = (u <= half) == (v <= half);
                    if (rng.next_unit() < (same ? spec.p : spec.q)) detail::push_edge(es, u, v);
                }
            }
            break;
        }
        case EnsembleKind::CompleteBipartite: {
            es.reserve(static_cast<std::size_t>(spec.a * spec.n));
            for (long long u = 1; u <= spec.a; ++u)
                for (long long v = 1; v <= spec.n; ++v) detail::push_edge(es, u, spec.a + v);
            break;
        }
        case EnsembleKind::StarUnion: {
            // Stars K_{1,2^s} for s = 1..m: |E| = 2^{m+1} - 2. (The source
            // text's index set nominally starts at 0, but its own edge count
            // 2^{m+1}-2 = sum_{s=1..m} 2^s pins s = 1..m.)
            long long next = 1;
            for (long long s = 1; s <= spec.m; ++s) {
                const long long hub = next++;
                const long long leaves = 1ll << s;
                for (long long l = 0; l < leaves; ++l) detail::push_edge(es, hub, next++);
            }
            break;
        }
        case EnsembleKind::Coexistence: {
            // Vertex 1: hub joined to all of 2..n^2+1. Block one: G(n, 1/2) on
            // {2..n+1}. Block two: G(n^2-n, 1/n^2) on {n+2..n^2+1}.
            const long long n = spec.n;
            const long long top = n * n + 1;
            Rng rng(child_seed(spec.seed, "edges", 0));
            for (long long v = 2; v <= top; ++v) detail::push_edge(es, 1, v);
            for (long long u = 2; u <= n + 1; ++u)
                for (long long v = u + 1; v <= n + 1; ++v)
                    if (rng.next_unit() < 0.5) detail::push_edge(es, u, v);
            const double p2 = 1.0 / static_cast<double>(n * n);
            for (long long u = n + 2; u <= top; ++u)
                for (long long v = u + 1; v <= top; ++v)
                    if (rng.next_unit() < p2) detail::push_edge(es, u, v);
            break;
        }
    }
    if (es.empty()) {
        throw RandomGraphEmpty("ensemble '" + spec.kind_name() +
                               "' drew zero edges; retry with another seed");
    }
    long long min_n = 0;
    switch (spec.kind) {
        case EnsembleKind::Complete:
        case EnsembleKind::ErdosRenyi:
        case EnsembleKind::Sbm: min_n = spec.n; break;
        case EnsembleKind::CompleteBipartite: min_n = spec.a + spec.n; break;
        case EnsembleKind::StarUnion: min_n = (1ll << (spec.m + 1)) - 2 + spec.m; break;
        case EnsembleKind::Coexistence: min_n = spec.n * spec.n + 1; break;
    }
    return Graph::from_edge_list(es, min_n);
}

// expected_limit(spec) — the closed-form limit law for each ensemble — lives
// with the rest of the closed-form catalog in qflimit/limits.hpp.

}  // namespace qflimit
