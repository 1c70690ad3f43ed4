#pragma once

// Distribution distances, exact and empirical fourth moments, and the
// normality classifier.
//
// The exact fourth moment sums the five multigraph classes with non-zero
// contribution; the coefficients (1, 6, 6, 36, 24) are locked by an
// exhaustive ordered-tuple oracle in the test suite, never assumed from the
// asymptotic displays.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qflimit/distributions.hpp"
#include "qflimit/errors.hpp"
#include "qflimit/graph.hpp"
#include "qflimit/motifs.hpp"
#include "qflimit/sampling.hpp"
#include "qflimit/spectra.hpp"

namespace qflimit {

// ---- analytic reference laws ---------------------------------------------------
//
// The law of a*(chi^2_1 - 1) + b*Z with Z standard normal independent of the
// chi-square. Pure cases have closed-form CDFs; the mixed case is evaluated by
// numeric convolution cached on a grid (range +-12, step 1e-3), which is ample
// for KS comparisons of unit-variance statistics.

class AnalyticLaw {
  public:
    static AnalyticLaw normal(double variance) {
        if (!(variance > 0.0)) throw InvalidParameter("normal law needs variance > 0");
        return AnalyticLaw(0.0, std::sqrt(variance));
    }
    static AnalyticLaw standard_normal() { return normal(1.0); }
    static AnalyticLaw centered_chi(double a) {
        if (a == 0.0) throw InvalidParameter("centered chi law needs a != 0");
        return AnalyticLaw(a, 0.0);
    }
    static AnalyticLaw chi_normal(double a, double b) {
        if (a == 0.0 && b == 0.0) {
            throw InvalidParameter("chi_normal law needs a != 0 or b != 0");
        }
        return AnalyticLaw(a, std::fabs(b));
    }

    /// Names accepted by the CLI: "normal", "normal:<var>", "chisq:<a>",
    /// "chisq-normal:<a>,<b>".
    static AnalyticLaw parse(const std::string& name) {
        const auto colon = name.find(':');
        const std::string head = name.substr(0, colon);
        const std::string args = colon == std::string::npos ? "" : name.substr(colon + 1);
        const auto parse_reals = [&](std::size_t want) {
            std::vector<double> out;
            std::size_t pos = 0;
            while (pos <= args.size() && out.size() < want) {
                const auto comma = args.find(',', pos);
                const std::string tok =
                    args.substr(pos, comma == std::string::npos ? std::string::npos
                                                                : comma - pos);
                char* endp = nullptr;
                const double v = std::strtod(tok.c_str(), &endp);
                if (endp == tok.c_str() || *endp != '\0') {
                    throw InvalidParameter("bad numeric argument in law '" + name + "'");
                }
                out.push_back(v);
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
            if (out.size() != want) {
                throw InvalidParameter("law '" + name + "' needs " + std::to_string(want) +
                                       " numeric arguments");
            }
            return out;
        };
        if (head == "normal") {
            if (colon == std::string::npos) return standard_normal();
            return normal(parse_reals(1)[0]);
        }
        if (head == "chisq") return centered_chi(parse_reals(1)[0]);
        if (head == "chisq-normal") {
            const auto v = parse_reals(2);
            return chi_normal(v[0], v[1]);
        }
        throw InvalidParameter("unknown analytic law '" + name +
                               "'; expected normal[:v], chisq:a, chisq-normal:a,b");
    }

    double chi_weight() const { return a_; }
    double normal_sd() const { return b_; }

    std::string name() const {
        char buf[96];
        if (a_ == 0.0) {
            std::snprintf(buf, sizeof(buf), "normal:%g", b_ * b_);
        } else if (b_ == 0.0) {
            std::snprintf(buf, sizeof(buf), "chisq:%g", a_);
        } else {
            std::snprintf(buf, sizeof(buf), "chisq-normal:%g,%g", a_, b_);
        }
        return buf;
    }

    double cdf(double x) const {
        if (a_ == 0.0) return normal_cdf(x / b_);
        if (b_ == 0.0) return chi_cdf(x);
        // Mixed: interpolate the cached convolution grid.
        if (x <= kGridLo) return 0.0;
        if (x >= kGridLo + kGridStep * static_cast<double>(grid_.size() - 1)) return 1.0;
        const double pos = (x - kGridLo) / kGridStep;
        const auto idx = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(idx);
        return grid_[idx] * (1.0 - frac) + grid_[idx + 1] * frac;
    }

  private:
    AnalyticLaw(double a, double b) : a_(a), b_(b) {
        if (a_ != 0.0 && b_ != 0.0) build_grid();
    }

    /// CDF of a*(chi^2_1 - 1): P(a(Z^2-1) <= x) with Z standard normal.
    double chi_cdf(double x) const {
        const double u = x / a_ + 1.0;  // threshold for Z^2
        if (a_ > 0.0) {
            if (u <= 0.0) return 0.0;
            return 2.0 * normal_cdf(std::sqrt(u)) - 1.0;
        }
        // a < 0: event is Z^2 >= u.
        if (u <= 0.0) return 1.0;
        return 2.0 * (1.0 - normal_cdf(std::sqrt(u)));
    }

    // CDF(x) = E_Z[ Phi((x - a(Z^2-1))/b) ]; with the chi variable written as
    // Z^2 the integrand is smooth, and Simpson over t in [0, 9] (weight
    // 2*phi(t)) reaches far below the interpolation error of the grid.
    void build_grid() {
        constexpr std::size_t kNodes = 1801;  // t step 0.005
        constexpr double kTMax = 9.0;
        std::vector<double> node_w(kNodes);
        std::vector<double> node_c(kNodes);
        const double h = kTMax / static_cast<double>(kNodes - 1);
        for (std::size_t i = 0; i < kNodes; ++i) {
            const double t = h * static_cast<double>(i);
            double w = (i == 0 || i + 1 == kNodes) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            w *= h / 3.0;
            node_w[i] = w * 2.0 * normal_pdf(t);
            node_c[i] = a_ * (t * t - 1.0);
        }
        const auto count =
            static_cast<std::size_t>(std::lround((kGridHi - kGridLo) / kGridStep)) + 1;
        grid_.resize(count);
        for (std::size_t k = 0; k < count; ++k) {
            const double x = kGridLo + kGridStep * static_cast<double>(k);
            double acc = 0.0;
            for (std::size_t i = 0; i < kNodes; ++i) {
                acc += node_w[i] * normal_cdf((x - node_c[i]) / b_);
            }
            grid_[k] = std::min(1.0, std::max(0.0, acc));
        }
        // Monotone repair of last-digit quadrature noise.
        for (std::size_t k = 1; k < count; ++k) grid_[k] = std::max(grid_[k], grid_[k - 1]);
    }

    static constexpr double kGridLo = -12.0;
    static constexpr double kGridHi = 12.0;
    static constexpr double kGridStep = 1e-3;

    double a_ = 0.0;
    double b_ = 1.0;
    std::vector<double> grid_;
};

// ---- distances -----------------------------------------------------------------

/// Two-sample Kolmogorov–Smirnov distance; inputs must be sorted ascending
/// (EmpiricalSample guarantees this).
inline double ks_distance(const EmpiricalSample& a, const EmpiricalSample& b) {
    if (a.values.empty() || b.values.empty()) {
        throw EmptySample("ks_distance: empty sample");
    }
    const auto& av = a.values;
    const auto& bv = b.values;
    const double na = static_cast<double>(av.size());
    const double nb = static_cast<double>(bv.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < av.size() && j < bv.size()) {
        const double v = std::min(av[i], bv[j]);
        while (i < av.size() && av[i] == v) ++i;
        while (j < bv.size() && bv[j] == v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    if (i < av.size()) d = std::max(d, 1.0 - static_cast<double>(j) / nb);
    if (j < bv.size()) d = std::max(d, 1.0 - static_cast<double>(i) / na);
    return d;
}

/// One-sample KS distance against an analytic CDF.
inline double ks_distance(const EmpiricalSample& a, const AnalyticLaw& law) {
    if (a.values.empty()) throw EmptySample("ks_distance: empty sample");
    const double n = static_cast<double>(a.values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double f = law.cdf(a.values[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - f));
    }
    return d;
}

/// Wasserstein-1 between equal-length sorted samples: mean |a_(i) - b_(i)|.
inline double wasserstein1(const EmpiricalSample& a, const EmpiricalSample& b) {
    if (a.values.empty() || b.values.empty()) {
        throw EmptySample("wasserstein1: empty sample");
    }
    if (a.values.size() != b.values.size()) {
        throw LengthMismatch("wasserstein1 needs equal-length samples, got " +
                             std::to_string(a.values.size()) + " and " +
                             std::to_string(b.values.size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        acc += std::fabs(a.values[i] - b.values[i]);
    return acc / static_cast<double>(a.values.size());
}

// ---- fourth moments --------------------------------------------------------------

struct MomentReport {
    std::optional<double> exact_fourth;   // exact E[S^4] given working moments
    std::optional<double> mc_fourth;      // Monte Carlo estimate, when run
    std::optional<double> mc_stderr;
    bool truncated = false;
    std::optional<double> M;
    std::size_t n = 0;
    std::uint64_t edge_count = 0;
    MotifCounts motifs;
    double m3 = 0.0;                      // working moments used
    double m4 = 0.0;

    nlohmann::json to_json() const {
        nlohmann::json j{{"truncated", truncated},
                         {"n", n},
                         {"edges", edge_count},
                         {"motifs", motifs.to_json()},
                         {"moments", {{"m3", m3}, {"m4", m4}}}};
        j["exact_fourth"] = exact_fourth ? nlohmann::json(*exact_fourth) : nlohmann::json();
        j["mc_fourth"] = mc_fourth ? nlohmann::json(*mc_fourth) : nlohmann::json();
        j["mc_stderr"] = mc_stderr ? nlohmann::json(*mc_stderr) : nlohmann::json();
        j["M"] = M ? nlohmann::json(*M) : nlohmann::json();
        return j;
    }
};

namespace detail {

/// E[S^4] from motif counts and the working variables' moments:
///   ( |E| m4^2 + 6 disjoint_pairs + 6 m4 cherries + 36 m3^2 triangles
///     + 24 four_cycles ) / |E|^2.
/// Classes with any multiplicity-1 vertex vanish (mean zero).
inline double fourth_moment_from_counts(const MotifCounts& c, double m3, double m4) {
    const double m = static_cast<double>(c.edges);
    const double total = m * m4 * m4 + 6.0 * static_cast<double>(c.disjoint_edge_pairs) +
                         6.0 * m4 * static_cast<double>(c.cherries) +
                         36.0 * m3 * m3 * static_cast<double>(c.triangles) +
                         24.0 * static_cast<double>(c.four_cycles);
    return total / (m * m);
}

}  // namespace detail

/// Exact E[S_G^4] for source f; with M given the working variables are the
/// truncated-and-standardized X_M, so the moment inputs come from
/// truncated_moments. Infinite m4 without truncation is an error.
inline double exact_fourth_moment(const Graph& g, const SourceDistribution& f,
                                  std::optional<double> M = std::nullopt) {
    Moments mom = M ? truncated_moments(f, *M) : f.moments();
    if (!std::isfinite(mom.m4)) {
        throw InfiniteFourthMoment("E[X^4] is infinite for " + f.name() +
                                   "; supply a truncation level M");
    }
    return detail::fourth_moment_from_counts(count_motifs(g), mom.m3, mom.m4);
}

/// Ground-truth fourth moment: brute-force sum over ALL ordered 4-tuples of
/// edges; each term is the product over vertices of the moment of the
/// vertex's multiplicity (m1 = 0, m2 = 1). Divided by |E|^2.
inline double oracle_fourth_moment(const Graph& g, const Moments& mom) {
    if (g.n() > 8) {
        throw TooLargeForOracle("oracle_fourth_moment capped at 8 vertices, got n = " +
                                std::to_string(g.n()));
    }
    if (!std::isfinite(mom.m4)) {
        throw InfiniteFourthMoment("oracle_fourth_moment needs finite m4");
    }
    const auto& fe = g.flat_edges();
    const std::size_t m = fe.size() / 2;
    const double moment_of[5] = {1.0, 0.0, 1.0, mom.m3, mom.m4};
    double total = 0.0;
    std::array<std::uint8_t, 8> mult{};
    std::array<std::uint32_t, 8> touched{};
    for (std::size_t e1 = 0; e1 < m; ++e1) {
        for (std::size_t e2 = 0; e2 < m; ++e2) {
            for (std::size_t e3 = 0; e3 < m; ++e3) {
                for (std::size_t e4 = 0; e4 < m; ++e4) {
                    std::size_t ntouch = 0;
                    for (const std::size_t e : {e1, e2, e3, e4}) {
                        for (const std::uint32_t v : {fe[2 * e], fe[2 * e + 1]}) {
                            if (mult[v] == 0) touched[ntouch++] = v;
                            ++mult[v];
                        }
                    }
                    double term = 1.0;
                    for (std::size_t t = 0; t < ntouch; ++t) {
                        term *= moment_of[mult[touched[t]]];
                        mult[touched[t]] = 0;
                    }
                    total += term;
                }
            }
        }
    }
    return total / (static_cast<double>(m) * static_cast<double>(m));
}

/// Monte Carlo estimate of E[S^4] with its standard error.
inline std::pair<double, double> mc_fourth_moment(const Graph& g, const SourceDistribution& f,
                                                  std::uint64_t reps, std::uint64_t seed,
                                                  std::optional<double> M = std::nullopt,
                                                  unsigned workers = 1) {
    const EmpiricalSample s = monte_carlo(g, f, reps, seed, M, workers);
    double mean = 0.0;
    for (const double v : s.values) mean += v * v * v * v;
    mean /= static_cast<double>(s.values.size());
    double var = 0.0;
    for (const double v : s.values) {
        const double d = v * v * v * v - mean;
        var += d * d;
    }
    var /= static_cast<double>(s.values.size());
    const double stderr_ = std::sqrt(var / static_cast<double>(s.values.size()));
    return {mean, stderr_};
}

/// The exact fourth moment across an ascending truncation grid — the inner
/// (M) limit of the truncated fourth-moment diagnostic, one graph at a time.
inline std::vector<MomentReport> truncated_fourth_moment_curve(
    const Graph& g, const SourceDistribution& f, const std::vector<double>& M_grid) {
    if (M_grid.empty()) throw InvalidParameter("M grid must be non-empty");
    for (std::size_t i = 1; i < M_grid.size(); ++i) {
        if (!(M_grid[i] > M_grid[i - 1])) {
            throw InvalidParameter("M grid must be strictly ascending");
        }
    }
    const MotifCounts counts = count_motifs(g);
    std::vector<MomentReport> out;
    out.reserve(M_grid.size());
    for (const double M : M_grid) {
        const Moments mom = truncated_moments(f, M);
        MomentReport rep;
        rep.exact_fourth = detail::fourth_moment_from_counts(counts, mom.m3, mom.m4);
        rep.truncated = true;
        rep.M = M;
        rep.n = static_cast<std::size_t>(g.n());
        rep.edge_count = g.edge_count();
        rep.motifs = counts;
        rep.m3 = mom.m3;
        rep.m4 = mom.m4;
        out.push_back(std::move(rep));
    }
    return out;
}

// ---- normality classifier --------------------------------------------------------

enum class CriterionBranch { RademacherC4, GeneralSpectral };

struct NormalityVerdict {
    CriterionBranch branch = CriterionBranch::GeneralSpectral;
    double criterion_value = 0.0;
    std::optional<double> fourth_moment_gap;  // E[S^4] - 3 when computable
    bool consistent_with_normal = false;
    double threshold = 0.0;

    nlohmann::json to_json() const {
        nlohmann::json j{
            {"branch", branch == CriterionBranch::RademacherC4 ? "rademacher_c4"
                                                               : "general_spectral"},
            {"criterion_value", criterion_value},
            {"verdict", consistent_with_normal ? "consistent_with_normal" : "inconsistent"},
            {"threshold", threshold}};
        j["fourth_moment_gap"] =
            fourth_moment_gap ? nlohmann::json(*fourth_moment_gap) : nlohmann::json();
        return j;
    }
};

/// Finite-n proxy for the limiting-normality conditions: Rademacher sources are
/// judged by N(C4)/|E|^2, everything else by max|lambda|/sqrt(|E|); verdict is
/// criterion < threshold. The raw value is always reported.
inline NormalityVerdict classify_normality(const Graph& g, const SourceDistribution& f,
                                           double threshold = 0.05) {
    if (!(threshold > 0.0)) {
        throw InvalidThreshold("classify_normality: threshold must be > 0");
    }
    NormalityVerdict v;
    v.threshold = threshold;
    if (f.is_rademacher()) {
        v.branch = CriterionBranch::RademacherC4;
        const MotifCounts c = count_motifs(g);
        const double m = static_cast<double>(c.edges);
        v.criterion_value = static_cast<double>(c.four_cycles) / (m * m);
    } else {
        v.branch = CriterionBranch::GeneralSpectral;
        v.criterion_value = spectral_criterion(g);
    }
    v.consistent_with_normal = v.criterion_value < threshold;
    if (std::isfinite(f.moments().m4)) {
        v.fourth_moment_gap = exact_fourth_moment(g, f) - 3.0;
    }
    return v;
}

/// max_u d_u / |E| — the universality certificate: small values imply the
/// limit law does not depend on the marginal F.
inline double universality_gap(const Graph& g) {
    return static_cast<double>(g.degrees()[0]) / static_cast<double>(g.edge_count());
}

}  // namespace qflimit
