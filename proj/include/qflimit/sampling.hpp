#pragma once

// Reproducible Monte Carlo evaluation of the edge statistic
//   S_G(x) = (1/sqrt(|E|)) * sum_{(u,v) in E} x_u x_v.
//
// Every replication r derives its own counter RNG from
// child_seed(master, "rep", r), so results are bit-identical regardless of
// worker count or execution order; the only post-processing is a final sort.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "qflimit/distributions.hpp"
#include "qflimit/errors.hpp"
#include "qflimit/graph.hpp"
#include "qflimit/rng.hpp"

namespace qflimit {

/// A sorted Monte Carlo sample with enough provenance to reproduce it.
struct EmpiricalSample {
    std::vector<double> values;  // sorted ascending
    std::uint64_t reps = 0;      // == values.size()
    std::uint64_t seed = 0;      // master seed the child streams derive from
    std::string graph_id;        // human-readable source description
    std::string f_id;            // source distribution name
    std::optional<double> M;     // truncation level, when one was applied

    nlohmann::json provenance_json() const {
        nlohmann::json j{{"reps", reps},
                         {"seed", seed},
                         {"graph_id", graph_id},
                         {"f", f_id}};
        if (M) {
            j["M"] = *M;
        } else {
            j["M"] = nullptr;
        }
        return j;
    }
};

/// Resolve a requested worker count: 0 means "ask the hardware".
inline unsigned resolve_workers(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

namespace detail {

/// Run body(begin, end) over [0, count) in chunks, on `workers` threads.
/// Chunk assignment is dynamic, so bodies must write only to disjoint
/// per-index slots; the first exception wins and is rethrown on the caller.
template <typename Body>
inline void parallel_chunks(std::uint64_t count, unsigned workers, Body&& body) {
    workers = resolve_workers(workers);
    constexpr std::uint64_t kChunk = 64;
    if (workers <= 1 || count <= kChunk) {
        body(std::uint64_t{0}, count);
        return;
    }
    std::atomic<std::uint64_t> cursor{0};
    std::exception_ptr first_error = nullptr;
    std::mutex error_mutex;
    const auto run = [&]() {
        for (;;) {
            const std::uint64_t begin = cursor.fetch_add(kChunk);
            if (begin >= count) return;
            const std::uint64_t end = std::min(count, begin + kChunk);
            try {
                body(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

/// One evaluation of S_G(x). Single pass over the flat edge array.
inline double statistic(const Graph& g, const std::vector<double>& x) {
    if (x.size() != static_cast<std::size_t>(g.n())) {
        throw LengthMismatch("statistic: |x| = " + std::to_string(x.size()) +
                             " but graph has n = " + std::to_string(g.n()));
    }
    if (g.edge_count() == 0) {
        throw EmptyGraph("statistic: graph has no edges");
    }
    const auto& fe = g.flat_edges();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < fe.size(); i += 2) acc += x[fe[i]] * x[fe[i + 1]];
    return acc / std::sqrt(static_cast<double>(g.edge_count()));
}

/// `reps` i.i.d. evaluations of S_G over fresh draws of f (optionally passed
/// through the M-truncation map). Bit-identical for any worker count.
inline EmpiricalSample monte_carlo(const Graph& g, const SourceDistribution& f,
                                   std::uint64_t reps, std::uint64_t seed,
                                   std::optional<double> M = std::nullopt,
                                   unsigned workers = 1) {
    if (reps < 1) throw InvalidParameter("monte_carlo: reps must be >= 1");
    if (g.edge_count() == 0) throw EmptyGraph("monte_carlo: graph has no edges");
    const auto n = static_cast<std::size_t>(g.n());
    std::optional<TruncationParams> trunc;
    if (M) trunc = truncation_params(f, *M);

    EmpiricalSample out;
    out.values.resize(reps);
    const auto& fe = g.flat_edges();
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(g.edge_count()));

    detail::parallel_chunks(reps, workers, [&](std::uint64_t begin, std::uint64_t end) {
        std::vector<double> x(n);
        for (std::uint64_t r = begin; r < end; ++r) {
            Rng rng(child_seed(seed, "rep", r));
            // Draw order is x_1..x_n; truncation applies per coordinate.
            if (trunc) {
                for (std::size_t i = 0; i < n; ++i)
                    x[i] = apply_truncation(f.draw_one(rng), *trunc);
            } else {
                for (std::size_t i = 0; i < n; ++i) x[i] = f.draw_one(rng);
            }
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < fe.size(); i += 2) acc += x[fe[i]] * x[fe[i + 1]];
            out.values[r] = acc * inv_sqrt_m;
        }
    });
    std::sort(out.values.begin(), out.values.end());

    out.reps = reps;
    out.seed = seed;
    out.f_id = f.name();
    out.graph_id = "graph(n=" + std::to_string(g.n()) +
                   ",m=" + std::to_string(g.edge_count()) + ")";
    out.M = M;
    return out;
}

// ---- sample persistence ------------------------------------------------------
//
// CSV: one value per line, full double precision. A JSON sidecar at
// "<path>.json" carries the provenance needed to re-run the producing command.

inline void write_sample_csv(std::ostream& os, const EmpiricalSample& sample) {
    char buf[64];
    for (const double v : sample.values) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", v);
        os << buf;
    }
}

inline void write_sample_csv_file(const std::string& path, const EmpiricalSample& sample) {
    {
        std::ofstream os(path);
        if (!os) throw IoError("cannot open for writing: " + path);
        write_sample_csv(os, sample);
        if (!os.good()) throw IoError("write failed: " + path);
    }
    std::ofstream sidecar(path + ".json");
    if (!sidecar) throw IoError("cannot open for writing: " + path + ".json");
    sidecar << sample.provenance_json().dump(2) << "\n";
    if (!sidecar.good()) throw IoError("write failed: " + path + ".json");
}

inline std::vector<double> read_sample_csv(std::istream& is) {
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        char* endp = nullptr;
        const double v = std::strtod(line.c_str(), &endp);
        if (endp == line.c_str() || *endp != '\0') {
            throw ParseError("sample CSV line " + std::to_string(lineno) +
                             ": expected one real number, got '" + line + "'");
        }
        values.push_back(v);
    }
    if (values.empty()) throw EmptySample("sample CSV contains no values");
    return values;
}

/// Load a persisted sample; provenance is restored from the sidecar when one
/// is present, otherwise left at defaults.
inline EmpiricalSample read_sample_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open sample file: " + path);
    EmpiricalSample s;
    s.values = read_sample_csv(is);
    std::sort(s.values.begin(), s.values.end());
    s.reps = s.values.size();
    std::ifstream sidecar(path + ".json");
    if (sidecar) {
        try {
            const auto j = nlohmann::json::parse(sidecar);
            s.seed = j.value("seed", std::uint64_t{0});
            s.graph_id = j.value("graph_id", std::string{});
            s.f_id = j.value("f", std::string{});
            if (j.contains("M") && !j.at("M").is_null()) s.M = j.at("M").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("malformed sample sidecar " + path + ".json: " + e.what());
        }
    }
    return s;
}

}  // namespace qflimit
