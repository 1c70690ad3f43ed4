#pragma once

// Limit-law parameter estimation and sampling.
//
// The limit of S_G is Q = Q1 + Q2 + Q3 with independent components
//   Q1 = sqrt(X' Sigma X) * Z       (normal variance mixture, X iid from F)
//   Q2 ~ N(0, rho_sq_residual)      with rho_sq_residual = 1 - sum_s(sigma_ss + rho_s^2/2)
//   Q3 = (1/2) sum_s rho_s (chi^2_1 - 1)
// Sigma comes from scaled co-degrees of the top-K vertices and rho from the
// scaled spectrum of the K-truncated graph. This header also houses the
// closed-form catalog for the worked ensembles and the chi-square
// representation of Q1 under Gaussian F.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qflimit/distributions.hpp"
#include "qflimit/ensembles.hpp"
#include "qflimit/errors.hpp"
#include "qflimit/graph.hpp"
#include "qflimit/rng.hpp"
#include "qflimit/sampling.hpp"
#include "qflimit/spectra.hpp"

namespace qflimit {

struct LimitSpec {
    Eigen::MatrixXd sigma;          // K x K, symmetric PSD (Gram-structured)
    std::vector<double> rho;        // s_max scaled eigenvalues, |.| descending
    double rho_sq_residual = 0.0;   // in [0, 1]
    std::size_t K = 0;
    std::size_t s_max = 0;
    nlohmann::json provenance = nlohmann::json::object();
    bool residual_clamped = false;  // raw residual fell outside [0, 1]
    double residual_raw = 0.0;

    /// Invariant checks shared by the estimator, the JSON reader, and the
    /// sampler. Throws InvalidSpec.
    void validate() const {
        if (sigma.rows() != sigma.cols() ||
            static_cast<std::size_t>(sigma.rows()) != K) {
            throw InvalidSpec("sigma must be K x K with K = " + std::to_string(K));
        }
        if (rho.size() != s_max) {
            throw InvalidSpec("rho must have s_max = " + std::to_string(s_max) +
                              " entries, got " + std::to_string(rho.size()));
        }
        for (std::size_t i = 0; i < K; ++i) {
            for (std::size_t j = i + 1; j < K; ++j) {
                if (std::fabs(sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                              sigma(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))) >
                    1e-9) {
                    throw InvalidSpec("sigma is not symmetric");
                }
            }
        }
        if (!(rho_sq_residual >= 0.0 && rho_sq_residual <= 1.0 + 1e-12)) {
            throw InvalidSpec("rho_sq_residual must lie in [0, 1], got " +
                              std::to_string(rho_sq_residual));
        }
        if (K > 0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
            if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < -1e-10) {
                throw InvalidSpec("sigma is not positive semidefinite within 1e-10");
            }
        }
    }

    nlohmann::json to_json() const {
        nlohmann::json sig = nlohmann::json::array();
        for (std::size_t i = 0; i < K; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t j = 0; j < K; ++j)
                row.push_back(sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            sig.push_back(std::move(row));
        }
        return {{"sigma", sig},
                {"rho", rho},
                {"rho_sq_residual", rho_sq_residual},
                {"K", K},
                {"s_max", s_max},
                {"provenance", provenance}};
    }

    static LimitSpec from_json(const nlohmann::json& j) {
        LimitSpec spec;
        try {
            spec.K = j.at("K").get<std::size_t>();
            spec.s_max = j.at("s_max").get<std::size_t>();
            const auto& sig = j.at("sigma");
            if (!sig.is_array() || sig.size() != spec.K) {
                throw ParseError("limit spec: sigma must be a K x K array, K = " +
                                 std::to_string(spec.K));
            }
            spec.sigma = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(spec.K),
                                               static_cast<Eigen::Index>(spec.K));
            for (std::size_t i = 0; i < spec.K; ++i) {
                const auto& row = sig.at(i);
                if (!row.is_array() || row.size() != spec.K) {
                    throw ParseError("limit spec: sigma row " + std::to_string(i) +
                                     " must have K entries");
                }
                for (std::size_t jj = 0; jj < spec.K; ++jj) {
                    spec.sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(jj)) =
                        row.at(jj).get<double>();
                }
            }
            spec.rho = j.at("rho").get<std::vector<double>>();
            spec.rho_sq_residual = j.at("rho_sq_residual").get<double>();
            if (j.contains("provenance")) spec.provenance = j.at("provenance");
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("malformed limit spec: ") + e.what());
        }
        try {
            spec.validate();
        } catch (const InvalidSpec& e) {
            throw ParseError(std::string("invalid limit spec: ") + e.what());
        }
        spec.residual_raw = spec.rho_sq_residual;
        return spec;
    }
};

/// Default truncation level: min(20, n/10), clamped to [1, n-1].
inline std::size_t default_K(std::size_t n) {
    const std::size_t k = std::min<std::size_t>(20, n / 10);
    return std::max<std::size_t>(1, std::min(k, n > 1 ? n - 1 : 1));
}

/// Default spectrum length: min(20, n-K), at least 1.
inline std::size_t default_s_max(std::size_t n, std::size_t K) {
    return std::max<std::size_t>(1, std::min<std::size_t>(20, n - K));
}

/// Estimate (Sigma, rho, rho^2) from a single graph:
/// sigma[s][t] = codegree(s,t)/|E| over the top-K vertices, rho from the
/// scaled truncated spectrum, and the residual clamped to [0,1] (flagged when
/// clamping changed the value).
inline LimitSpec estimate_limit_spec(const Graph& g, std::size_t K, std::size_t s_max) {
    const auto n = static_cast<std::size_t>(g.n());
    if (K < 1 || K >= n) {
        throw InvalidParameter("estimate_limit_spec: need 1 <= K < n, got K = " +
                               std::to_string(K) + ", n = " + std::to_string(n));
    }
    if (s_max < 1 || s_max > n - K) {
        throw InvalidParameter("estimate_limit_spec: need 1 <= s_max <= n - K, got s_max = " +
                               std::to_string(s_max));
    }
    LimitSpec spec;
    spec.K = K;
    spec.s_max = s_max;
    const double m = static_cast<double>(g.edge_count());
    spec.sigma = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K),
                                       static_cast<Eigen::Index>(K));
    for (std::size_t s = 0; s < K; ++s) {
        for (std::size_t t = s; t < K; ++t) {
            const double v =
                static_cast<double>(g.codegree(static_cast<int>(s) + 1,
                                               static_cast<int>(t) + 1)) / m;
            spec.sigma(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = v;
            spec.sigma(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) = v;
        }
    }
    spec.rho = scaled_truncated_spectrum(g, K, s_max).values;
    spec.rho.resize(s_max, 0.0);  // truncated spectra shorter than s_max pad with zeros

    double sum_sigma_diag = 0.0;
    for (std::size_t s = 0; s < K; ++s)
        sum_sigma_diag += spec.sigma(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
    double sum_rho_sq = 0.0;
    for (const double r : spec.rho) sum_rho_sq += r * r;
    spec.residual_raw = 1.0 - sum_sigma_diag - 0.5 * sum_rho_sq;
    spec.rho_sq_residual = std::clamp(spec.residual_raw, 0.0, 1.0);
    spec.residual_clamped = spec.rho_sq_residual != spec.residual_raw;

    spec.provenance = {{"n", n},
                       {"edges", g.edge_count()},
                       {"K", K},
                       {"s_max", s_max},
                       {"residual_raw", spec.residual_raw},
                       {"residual_clamped", spec.residual_clamped}};
    spec.validate();
    return spec;
}

/// Draw `reps` samples of Q = Q1 + Q2 + Q3. Per replication r the stream is
/// child_seed(seed, "limit-rep", r) and the draw order is fixed:
/// x_1..x_K from f (truncated if M is given), then z, z', then g_1..g_{s_max}
/// standard normals. Deterministic for any worker count.
inline EmpiricalSample sample_limit(const LimitSpec& spec, const SourceDistribution& f,
                                    std::uint64_t reps, std::uint64_t seed,
                                    std::optional<double> M = std::nullopt,
                                    unsigned workers = 1) {
    if (reps < 1) throw InvalidParameter("sample_limit: reps must be >= 1");
    spec.validate();
    std::optional<TruncationParams> trunc;
    if (M) trunc = truncation_params(f, *M);
    const std::size_t K = spec.K;
    const std::size_t s_max = spec.s_max;
    const double sd_q2 = std::sqrt(std::max(0.0, spec.rho_sq_residual));

    EmpiricalSample out;
    out.values.resize(reps);
    detail::parallel_chunks(reps, workers, [&](std::uint64_t begin, std::uint64_t end) {
        std::vector<double> x(K);
        for (std::uint64_t r = begin; r < end; ++r) {
            Rng rng(child_seed(seed, "limit-rep", r));
            for (std::size_t i = 0; i < K; ++i) {
                const double v = f.draw_one(rng);
                x[i] = trunc ? apply_truncation(v, *trunc) : v;
            }
            const double z = rng.next_normal();
            const double zp = rng.next_normal();
            double v_mix = 0.0;
            for (std::size_t i = 0; i < K; ++i) {
                double row = 0.0;
                for (std::size_t j = 0; j < K; ++j)
                    row += spec.sigma(static_cast<Eigen::Index>(i),
                                      static_cast<Eigen::Index>(j)) * x[j];
                v_mix += x[i] * row;
            }
            const double q1 = std::sqrt(std::max(0.0, v_mix)) * z;
            const double q2 = sd_q2 * zp;
            double q3 = 0.0;
            for (std::size_t s = 0; s < s_max; ++s) {
                const double gs = rng.next_normal();
                q3 += spec.rho[s] * (gs * gs - 1.0);
            }
            out.values[r] = q1 + q2 + 0.5 * q3;
        }
    });
    std::sort(out.values.begin(), out.values.end());

    out.reps = reps;
    out.seed = seed;
    out.f_id = f.name();
    out.graph_id = "limit(K=" + std::to_string(K) + ",s_max=" + std::to_string(s_max) + ")";
    out.M = M;
    return out;
}

/// Exact limit parameters for the worked ensembles, in the decomposition
///   Q = N(0, gaussian_variance) + sum_j chi_weights[j] * (chi^2_1 - 1)
///       [+ sqrt(X' mixture_sigma X) * Z when a mixture block is present].
struct ClosedFormLimit {
    double gaussian_variance = 0.0;
    std::vector<double> chi_weights;
    std::optional<Eigen::MatrixXd> mixture_sigma;
    std::string note;
};

/// Convert a closed form into a sampleable LimitSpec
/// (rho_s = 2 * chi_weights[s]; residual = gaussian_variance).
inline LimitSpec to_limit_spec(const ClosedFormLimit& law) {
    LimitSpec spec;
    if (law.mixture_sigma) {
        spec.sigma = *law.mixture_sigma;
        spec.K = static_cast<std::size_t>(spec.sigma.rows());
    } else {
        spec.sigma = Eigen::MatrixXd::Zero(0, 0);
        spec.K = 0;
    }
    spec.rho.reserve(law.chi_weights.size());
    for (const double w : law.chi_weights) spec.rho.push_back(2.0 * w);
    spec.s_max = spec.rho.size();
    spec.rho_sq_residual = law.gaussian_variance;
    spec.residual_raw = law.gaussian_variance;
    spec.provenance = {{"source", "closed_form"}, {"note", law.note}};
    spec.validate();
    return spec;
}

/// The catalog of exact limits for the built-in ensembles (asymptotic in the
/// ensemble's growth parameter). Throws NoClosedForm for anything outside it.
inline ClosedFormLimit closed_form(const EnsembleSpec& sp) {
    sp.validate();
    ClosedFormLimit law;
    switch (sp.kind) {
        case EnsembleKind::Complete: {
            law.gaussian_variance = 0.0;
            law.chi_weights = {1.0 / std::sqrt(2.0)};
            law.note = "complete graph: (chi^2_1 - 1)/sqrt(2)";
            return law;
        }
        case EnsembleKind::ErdosRenyi: {
            // Dense G(n,p): N(0, 1-p) + sqrt(p/2)(chi^2_1 - 1). As p -> 0 this
            // degrades continuously to the sparse-regime N(0,1).
            law.gaussian_variance = 1.0 - sp.p;
            law.chi_weights = {std::sqrt(sp.p / 2.0)};
            law.note = "erdos-renyi: N(0,1-p) + sqrt(p/2)(chi^2_1 - 1)";
            return law;
        }
        case EnsembleKind::Sbm: {
            const double p = sp.p, q = sp.q;
            law.gaussian_variance = 1.0 - (p * p + q * q) / (p + q);
            law.chi_weights = {std::sqrt(p + q) / 2.0,
                               (p - q) / (2.0 * std::sqrt(p + q))};
            law.note = "two-block SBM: two centered chi-square terms";
            return law;
        }
        case EnsembleKind::CompleteBipartite: {
            // Fixed small side a, n -> infinity: pure mixture
            // Q = sqrt(X' (J_a/a) X) Z = |sum_i X_i| / sqrt(a) * Z.
            const auto a = static_cast<Eigen::Index>(sp.a);
            law.mixture_sigma =
                Eigen::MatrixXd::Constant(a, a, 1.0 / static_cast<double>(sp.a));
            law.gaussian_variance = 0.0;
            law.note = "complete bipartite, fixed a: normal variance mixture J_a/a";
            return law;
        }
        case EnsembleKind::StarUnion: {
            // sigma_ss = 2^{-s}; the tail beyond the cap carries 2^{-cap}
            // of variance and is folded into the Gaussian part (< 1e-12 at 40).
            const long long cap = std::min<long long>(sp.m, 40);
            const auto k = static_cast<Eigen::Index>(cap);
            Eigen::MatrixXd sig = Eigen::MatrixXd::Zero(k, k);
            double tail = 1.0;
            for (long long s = 1; s <= cap; ++s) {
                const double w = std::pow(2.0, -static_cast<double>(s));
                sig(static_cast<Eigen::Index>(s - 1), static_cast<Eigen::Index>(s - 1)) = w;
                tail -= w;
            }
            law.mixture_sigma = std::move(sig);
            law.gaussian_variance = std::max(0.0, tail);
            law.note = "star union: diagonal mixture sigma_ss = 2^-s";
            return law;
        }
        case EnsembleKind::Coexistence: {
            // Hub + dense block + sparse block: sigma = [[4/7]],
            // rho_1 = 1/sqrt(7) (chi weight 1/(2 sqrt 7)), residual 5/14.
            law.mixture_sigma = Eigen::MatrixXd::Constant(1, 1, 4.0 / 7.0);
            law.chi_weights = {0.5 / std::sqrt(7.0)};
            law.gaussian_variance = 5.0 / 14.0;
            law.note = "coexistence: mixture + chi + gaussian all present";
            return law;
        }
    }
    throw NoClosedForm("no closed-form limit for ensemble '" + sp.kind_name() + "'");
}

/// Under F = standard normal, Q1 = sqrt(X' Sigma X) Z collapses to a weighted
/// sum of independent centered chi-squares with weight pairs +-sqrt(lambda)/2
/// over sigma's eigenvalues. Returns the merged representation of the whole
/// spec: those pairs, then rho_s/2; gaussian part = rho_sq_residual.
inline ClosedFormLimit gaussian_f_chi_representation(const LimitSpec& spec) {
    spec.validate();
    ClosedFormLimit law;
    law.gaussian_variance = spec.rho_sq_residual;
    if (spec.K > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.sigma, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) {
            throw InvalidSpec("sigma eigendecomposition failed");
        }
        std::vector<double> lambdas(es.eigenvalues().data(),
                                    es.eigenvalues().data() + spec.K);
        std::sort(lambdas.begin(), lambdas.end(), std::greater<double>());
        for (const double l : lambdas) {
            if (l < 1e-14) continue;  // PSD already verified; skip numerical zeros
            const double w = 0.5 * std::sqrt(l);
            law.chi_weights.push_back(w);
            law.chi_weights.push_back(-w);
        }
    }
    for (const double r : spec.rho) law.chi_weights.push_back(0.5 * r);
    law.note = "gaussian-F chi representation";
    return law;
}

// ---- limit spec file I/O -----------------------------------------------------

inline LimitSpec read_limit_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open limit spec file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed JSON in " + path + ": " + e.what());
    }
    return LimitSpec::from_json(j);
}

inline void write_limit_spec_file(const std::string& path, const LimitSpec& spec) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << spec.to_json().dump(2) << "\n";
    if (!out.good()) throw IoError("write failed: " + path);
}

}  // namespace qflimit
