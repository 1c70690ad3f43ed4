#pragma once

// Symmetric eigensolves of adjacency matrices and the scaled spectral
// quantities that drive the rho-parameters and the spectral normality
// criterion.
//
// Small matrices (or full-spectrum requests) go through Eigen's dense
// self-adjoint solver. Larger top-s requests use Lanczos with full
// reorthogonalization, deterministic start vectors, and deflation restarts so
// repeated eigenvalues (e.g. the zeros of a star forest) are recovered with
// their multiplicity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

// Eigen's packed-product kernels trip -Wmaybe-uninitialized on g++ 11 at -O2;
// the warning is inside Eigen, not in code that uses it.
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"
#endif
#include <Eigen/Dense>
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic pop
#endif

#include "qflimit/errors.hpp"
#include "qflimit/graph.hpp"
#include "qflimit/rng.hpp"

namespace qflimit {

/// Hard cap for dense full-spectrum solves (memory + O(n^3) time guard).
inline constexpr std::size_t kDenseSpectrumCap = 5000;
/// Below this size, top-s requests just take the dense spectrum.
inline constexpr std::size_t kDenseTopCap = 600;

/// Top eigenvalues of a truncated graph divided by the FULL graph's sqrt(|E|).
struct ScaledSpectrum {
    std::vector<double> values;             // lambda^{(s)} / sqrt(|E(G)|), |.| descending
    std::uint64_t source_edge_count = 0;    // |E(G)| of the untruncated graph
    std::size_t K = 0;                      // truncation level the spectrum was taken at
};

namespace detail {

/// Order eigenvalues by descending |lambda|, ties by descending signed value.
inline void sort_by_abs_desc(std::vector<double>& v) {
    std::sort(v.begin(), v.end(), [](double a, double b) {
        const double fa = std::fabs(a);
        const double fb = std::fabs(b);
        if (fa != fb) return fa > fb;
        return a > b;
    });
}

/// y = A x through the CSR adjacency (0-based).
inline void adjacency_mul(const Graph& g, const double* x, double* y) {
    const auto& off = g.csr_offsets();
    const auto& adj = g.csr_neighbors();
    const auto n = static_cast<std::size_t>(g.n());
    for (std::size_t u = 0; u < n; ++u) {
        double acc = 0.0;
        for (std::size_t k = off[u]; k < off[u + 1]; ++k) acc += x[adj[k]];
        y[u] = acc;
    }
}

inline std::vector<double> dense_spectrum_sorted(const Graph& g) {
    const auto n = static_cast<std::size_t>(g.n());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    const auto& off = g.csr_offsets();
    const auto& adj = g.csr_neighbors();
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t k = off[u]; k < off[u + 1]; ++k)
            A(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(adj[k])) = 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceFailure("dense eigensolve failed for n = " + std::to_string(n));
    }
    std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    sort_by_abs_desc(out);
    return out;
}

/// Lanczos with full reorthogonalization against both the active basis and the
/// deflated (converged) Ritz vectors; deterministic restarts recover
/// multiplicities one copy per sweep. Returns the top-`want` eigenvalues by
/// |lambda|.
inline std::vector<double> lanczos_top(const Graph& g, std::size_t want) {
    using Vec = Eigen::VectorXd;
    const auto n = static_cast<std::size_t>(g.n());
    const auto idx = [](std::size_t v) { return static_cast<Eigen::Index>(v); };

    std::vector<double> locked_values;   // converged eigenvalues
    std::vector<Vec> locked_vectors;     // matching orthonormal Ritz vectors
    const double scale = std::max(1.0, static_cast<double>(
                                           *std::max_element(g.degrees().begin(),
                                                             g.degrees().end())));
    const double kResidualTol = 1e-9 * scale;
    const double kBreakdownTol = 1e-12 * scale;
    const std::size_t kMaxSweeps = want + 12;
    std::size_t budget = std::max<std::size_t>(2 * want + 80, 120);
    const std::size_t kBudgetCap = 800;
    bool last_sweep_stalled = false;

    const auto orth_against = [&](Vec& v, const std::vector<Vec>& basis, std::size_t count) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < count; ++j) v -= basis[j].dot(v) * basis[j];
            for (const Vec& lv : locked_vectors) v -= lv.dot(v) * lv;
        }
    };

    for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (locked_values.size() >= n) break;
        const std::size_t free_dim = n - locked_values.size();
        const std::size_t m_max = std::min(free_dim, budget);

        // Deterministic start vector for this sweep, pushed into the
        // complement of everything already locked.
        Vec q(idx(n));
        Rng rng(child_seed(0x00C0FFEEULL, "lanczos-start", sweep));
        std::vector<Vec> basis;
        basis.reserve(m_max);
        {
            bool ok = false;
            for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
                for (std::size_t i = 0; i < n; ++i) q[idx(i)] = 2.0 * rng.next_unit() - 1.0;
                orth_against(q, basis, 0);
                const double nrm = q.norm();
                if (nrm > 1e-8) {
                    q /= nrm;
                    ok = true;
                }
            }
            if (!ok) {
                throw ConvergenceFailure("could not find a start vector in the complement");
            }
        }

        std::vector<double> alpha;
        std::vector<double> beta;  // beta[j] couples basis[j] to basis[j+1]
        Vec w(idx(n));
        bool broke_down = false;
        for (std::size_t j = 0; j < m_max; ++j) {
            basis.push_back(q);
            adjacency_mul(g, basis[j].data(), w.data());
            const double a = basis[j].dot(w);
            alpha.push_back(a);
            w -= a * basis[j];
            if (j > 0) w -= beta[j - 1] * basis[j - 1];
            orth_against(w, basis, basis.size());
            const double b = w.norm();
            if (b <= kBreakdownTol) {
                broke_down = true;  // invariant subspace: all Ritz pairs exact
                break;
            }
            beta.push_back(b);
            q = w / b;
        }

        const std::size_t m = basis.size();
        Eigen::VectorXd diag(idx(m));
        Eigen::VectorXd sub(idx(m > 0 ? m - 1 : 0));
        for (std::size_t j = 0; j < m; ++j) diag[idx(j)] = alpha[j];
        for (std::size_t j = 0; j + 1 < m; ++j) sub[idx(j)] = beta[j];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small;
        small.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        if (small.info() != Eigen::Success) {
            throw ConvergenceFailure("tridiagonal eigensolve failed in Lanczos sweep");
        }

        // Residual of Ritz pair i is |beta_m * y_i[m-1]|; on breakdown the
        // coupling to the rest of the space is ~0 and every pair is exact.
        const double tail = broke_down ? 0.0 : beta.back();

        double max_unconverged = 0.0;
        std::size_t newly_locked = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const double theta = small.eigenvalues()[idx(i)];
            const double last_comp = std::fabs(small.eigenvectors()(idx(m - 1), idx(i)));
            const double residual = tail * last_comp;
            if (residual <= kResidualTol) {
                Vec ritz = Vec::Zero(idx(n));
                for (std::size_t j = 0; j < m; ++j)
                    ritz += small.eigenvectors()(idx(j), idx(i)) * basis[j];
                // Re-orthonormalize against the locked set for numerical hygiene.
                for (const Vec& u : locked_vectors) ritz -= u.dot(ritz) * u;
                const double nrm = ritz.norm();
                if (nrm > 1e-8) {
                    ritz /= nrm;
                    locked_values.push_back(theta);
                    locked_vectors.push_back(std::move(ritz));
                    ++newly_locked;
                }
            } else {
                max_unconverged = std::max(max_unconverged, std::fabs(theta));
            }
        }
        if (newly_locked == 0) {
            if (last_sweep_stalled || budget >= std::min(kBudgetCap, free_dim)) {
                throw ConvergenceFailure(
                    "Lanczos sweep converged no Ritz pairs (n = " + std::to_string(n) +
                    ", sweep " + std::to_string(sweep) + ", budget " +
                    std::to_string(budget) + ")");
            }
            last_sweep_stalled = true;
            budget = std::min(kBudgetCap, budget * 2);
            continue;
        }
        last_sweep_stalled = false;
        if (locked_values.size() >= want) {
            std::vector<double> sorted_abs(locked_values);
            sort_by_abs_desc(sorted_abs);
            const double threshold = std::fabs(sorted_abs[want - 1]);
            if (max_unconverged <= threshold + 1e-8 * scale) break;
        }
    }

    if (locked_values.size() < want) {
        throw ConvergenceFailure("Lanczos captured only " +
                                 std::to_string(locked_values.size()) + " of " +
                                 std::to_string(want) + " requested eigenvalues");
    }
    sort_by_abs_desc(locked_values);
    locked_values.resize(want);
    return locked_values;
}

}  // namespace detail

/// All n eigenvalues of the adjacency matrix, sorted by descending |lambda|
/// (ties: descending signed value). Guarded by the dense cap.
inline std::vector<double> adjacency_spectrum(const Graph& g) {
    if (static_cast<std::size_t>(g.n()) > kDenseSpectrumCap) {
        throw TooLarge("adjacency_spectrum: n = " + std::to_string(g.n()) +
                       " exceeds the dense-eigensolve cap " +
                       std::to_string(kDenseSpectrumCap));
    }
    return detail::dense_spectrum_sorted(g);
}

/// Top `s` eigenvalues by |lambda| (ties: descending signed value). Dense for
/// small graphs, deflated Lanczos above the dispatch size.
inline std::vector<double> top_eigenvalues(const Graph& g, std::size_t s) {
    const auto n = static_cast<std::size_t>(g.n());
    if (s < 1) throw InvalidParameter("top_eigenvalues: s must be >= 1");
    if (s > n) {
        throw InvalidParameter("top_eigenvalues: s = " + std::to_string(s) +
                               " exceeds n = " + std::to_string(g.n()));
    }
    if (g.edge_count() == 0) return std::vector<double>(s, 0.0);
    if (n <= kDenseTopCap || s * 2 >= n) {
        if (n > kDenseSpectrumCap) {
            throw TooLarge("top_eigenvalues: s too close to n for an iterative solve and n "
                           "exceeds the dense cap");
        }
        auto all = detail::dense_spectrum_sorted(g);
        all.resize(s);
        return all;
    }
    return detail::lanczos_top(g, s);
}

/// Top eigenvalues of truncated_graph(g, K), scaled by sqrt(|E(G)|) of the
/// FULL graph. Returns min(top_s, n-K) values.
inline ScaledSpectrum scaled_truncated_spectrum(const Graph& g, std::size_t K,
                                                std::size_t top_s) {
    const auto n = static_cast<std::size_t>(g.n());
    if (top_s < 1) throw InvalidParameter("scaled_truncated_spectrum: top_s must be >= 1");
    if (K >= n) {
        throw IndexOutOfRange("scaled_truncated_spectrum: K = " + std::to_string(K) +
                              " must be < n = " + std::to_string(g.n()));
    }
    ScaledSpectrum out;
    out.source_edge_count = g.edge_count();
    out.K = K;
    const std::size_t take = std::min(top_s, n - K);
    const Graph gk = truncated_graph(g, static_cast<int>(K));
    if (gk.edge_count() == 0) {
        out.values.assign(take, 0.0);
        return out;
    }
    out.values = top_eigenvalues(gk, take);
    const double scale = 1.0 / std::sqrt(static_cast<double>(out.source_edge_count));
    for (double& v : out.values) v *= scale;
    return out;
}

/// max_u |lambda_u| / sqrt(|E|) — vanishing along a graph sequence
/// characterizes asymptotic normality for non-Rademacher sources.
inline double spectral_criterion(const Graph& g) {
    const double lmax = std::fabs(top_eigenvalues(g, 1)[0]);
    return lmax / std::sqrt(static_cast<double>(g.edge_count()));
}

/// CSV export: "index,lambda,scaled" with 1-based index; `scale` is the
/// divisor applied to the lambda column (typically sqrt(|E|)).
inline void write_spectrum_csv(std::ostream& os, const std::vector<double>& lambdas,
                               double scale) {
    if (!(scale > 0.0)) throw InvalidParameter("write_spectrum_csv: scale must be positive");
    os << "index,lambda,scaled\n";
    char buf[128];
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i + 1, lambdas[i],
                      lambdas[i] / scale);
        os << buf;
    }
}

}  // namespace qflimit
