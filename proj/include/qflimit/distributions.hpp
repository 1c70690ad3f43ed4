#pragma once

// The catalog of standardized source laws F (mean 0, variance 1 exactly) and
// the truncation transform
//
//     X_M = b_M^{-1/2} (X 1{|X|<=M} - a_M),   a_M = E[X 1{|X|<=M}],
//                                             b_M = Var[X 1{|X|<=M}].
//
// a_M and b_M (and the third/fourth moments of X_M) all come from closed
// forms; the test suite re-derives every one of them by adaptive quadrature.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qflimit/errors.hpp"
#include "qflimit/rng.hpp"

namespace qflimit {

enum class SourceKind {
    Rademacher,          // uniform on {-1,+1}
    StandardNormal,      // N(0,1)
    UniformStd,          // uniform on [-sqrt(3), sqrt(3)]
    ExpCenteredStd,      // Exp(1) - 1
    SymmetricParetoStd,  // density (alpha/2) x0^alpha |x|^{-alpha-1}, |x| >= x0
};

/// Moment metadata of a standardized law. m4 and var_x2 may be +infinity
/// (SymmetricParetoStd); var_x2 = m4 - 1 always, since E X^2 = 1.
struct Moments {
    double m3 = 0.0;
    double m4 = 0.0;
    double var_x2 = 0.0;
};

class SourceDistribution {
  public:
    static SourceDistribution rademacher() { return SourceDistribution(SourceKind::Rademacher); }
    static SourceDistribution standard_normal() {
        return SourceDistribution(SourceKind::StandardNormal);
    }
    static SourceDistribution uniform_std() { return SourceDistribution(SourceKind::UniformStd); }
    static SourceDistribution exp_centered_std() {
        return SourceDistribution(SourceKind::ExpCenteredStd);
    }
    /// 3 < alpha < 4: finite E|X|^3, infinite E X^4.
    static SourceDistribution symmetric_pareto_std(double alpha = 3.5) {
        if (!(alpha > 3.0 && alpha < 4.0)) {
            throw InvalidParameter("pareto tail index must lie in (3,4), got " +
                                   std::to_string(alpha));
        }
        SourceDistribution f(SourceKind::SymmetricParetoStd);
        f.alpha_ = alpha;
        f.x0_ = std::sqrt((alpha - 2.0) / alpha);  // makes E X^2 = 1 exactly
        return f;
    }

    /// Names accepted: rademacher | normal | uniform | exp | pareto | pareto:A
    static SourceDistribution parse(const std::string& name) {
        if (name == "rademacher") return rademacher();
        if (name == "normal") return standard_normal();
        if (name == "uniform") return uniform_std();
        if (name == "exp") return exp_centered_std();
        if (name == "pareto") return symmetric_pareto_std();
        if (name.rfind("pareto:", 0) == 0) {
            try {
                return symmetric_pareto_std(std::stod(name.substr(7)));
            } catch (const std::logic_error&) {
                throw InvalidParameter("bad pareto tail index in '" + name + "'");
            }
        }
        throw InvalidParameter("unknown source distribution '" + name +
                               "' (want rademacher|normal|uniform|exp|pareto[:alpha])");
    }

    SourceKind kind() const noexcept { return kind_; }
    bool is_rademacher() const noexcept { return kind_ == SourceKind::Rademacher; }
    double alpha() const noexcept { return alpha_; }
    /// Lower support edge of |X| for the Pareto law.
    double pareto_x0() const noexcept { return x0_; }

    std::string name() const {
        switch (kind_) {
            case SourceKind::Rademacher: return "rademacher";
            case SourceKind::StandardNormal: return "normal";
            case SourceKind::UniformStd: return "uniform";
            case SourceKind::ExpCenteredStd: return "exp";
            case SourceKind::SymmetricParetoStd: {
                char buf[32];
                std::snprintf(buf, sizeof buf, "pareto:%g", alpha_);
                return buf;
            }
        }
        return "unknown";
    }

    Moments moments() const {
        constexpr double inf = std::numeric_limits<double>::infinity();
        switch (kind_) {
            case SourceKind::Rademacher: return {0.0, 1.0, 0.0};
            case SourceKind::StandardNormal: return {0.0, 3.0, 2.0};
            case SourceKind::UniformStd: return {0.0, 9.0 / 5.0, 4.0 / 5.0};
            case SourceKind::ExpCenteredStd: return {2.0, 9.0, 8.0};
            case SourceKind::SymmetricParetoStd: return {0.0, inf, inf};
        }
        return {};
    }

    double draw_one(Rng& rng) const {
        switch (kind_) {
            case SourceKind::Rademacher: return rng.next_sign();
            case SourceKind::StandardNormal: return rng.next_normal();
            case SourceKind::UniformStd:
                return (2.0 * rng.next_unit() - 1.0) * 1.7320508075688772935;
            case SourceKind::ExpCenteredStd: return rng.next_exponential() - 1.0;
            case SourceKind::SymmetricParetoStd: {
                // |X| = x0 U^{-1/alpha} by inverse CDF; sign from a fresh draw.
                const double mag = x0_ * std::pow(rng.next_unit(), -1.0 / alpha_);
                return rng.next_sign() * mag;
            }
        }
        return 0.0;
    }

  private:
    explicit SourceDistribution(SourceKind k) : kind_(k) {}
    SourceKind kind_;
    double alpha_ = 0.0;
    double x0_ = 0.0;
};

/// Standard normal CDF / density.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }
inline double normal_pdf(double x) {
    return 0.39894228040143267794 * std::exp(-0.5 * x * x);
}

struct TruncationParams {
    double M = 0.0;
    double a_M = 0.0;
    double b_M = 0.0;
};

namespace detail {

/// Raw truncated power moments r_k = E[X^k 1{|X|<=M}], k = 1..4, closed form.
struct RawTruncatedMoments {
    double r1 = 0, r2 = 0, r3 = 0, r4 = 0;
};

inline RawTruncatedMoments raw_truncated_moments(const SourceDistribution& f, double M) {
    RawTruncatedMoments r;
    switch (f.kind()) {
        case SourceKind::Rademacher:
            if (M >= 1.0) r = {0.0, 1.0, 0.0, 1.0};
            break;
        case SourceKind::StandardNormal: {
            const double c = 2.0 * normal_cdf(M) - 1.0;  // P(|X| <= M)
            const double t = 2.0 * M * normal_pdf(M);
            r.r2 = c - t;
            r.r4 = 3.0 * c - t * (M * M + 3.0);
            break;
        }
        case SourceKind::UniformStd: {
            const double s3 = 1.7320508075688772935;
            const double c = std::min(M, s3);
            r.r2 = c * c * c / (3.0 * s3);
            r.r4 = c * c * c * c * c / (5.0 * s3);
            break;
        }
        case SourceKind::ExpCenteredStd: {
            // X = E - 1 with E ~ Exp(1); X in [-1, inf). With u = x:
            // int u^k e^{-(u+1)} du = e^{-1} [ -e^{-u} P_k(u) ], where
            // P_k(u) = sum_j (k)_j u^{k-j} (falling-factorial tail polynomial).
            const double lo = std::max(-1.0, -M), hi = M;
            auto seg = [&](auto poly) {
                return std::exp(-1.0) *
                       (std::exp(-lo) * poly(lo) - std::exp(-hi) * poly(hi));
            };
            r.r1 = seg([](double u) { return u + 1.0; });
            r.r2 = seg([](double u) { return u * u + 2.0 * u + 2.0; });
            r.r3 = seg([](double u) { return ((u + 3.0) * u + 6.0) * u + 6.0; });
            r.r4 = seg([](double u) { return (((u + 4.0) * u + 12.0) * u + 24.0) * u + 24.0; });
            break;
        }
        case SourceKind::SymmetricParetoStd: {
            const double x0 = f.pareto_x0(), a = f.alpha();
            if (M >= x0) {
                r.r2 = 1.0 - std::pow(x0 / M, a - 2.0);
                r.r4 = a * x0 * x0 * x0 * x0 / (4.0 - a) *
                       (std::pow(M / x0, 4.0 - a) - 1.0);
            }
            break;
        }
    }
    return r;
}

}  // namespace detail

inline TruncationParams truncation_params(const SourceDistribution& f, double M) {
    if (!(M > 0.0)) throw InvalidParameter("truncation level M must be positive");
    const auto r = detail::raw_truncated_moments(f, M);
    const double a = r.r1;
    const double b = r.r2 - a * a;
    if (!(b > 1e-14)) {
        throw DegenerateTruncation("b_M is not positive at M=" + std::to_string(M) +
                                   " for F=" + f.name());
    }
    return {M, a, b};
}

/// Moments of the standardized truncated variable X_M (always finite).
/// Note E X_M = 0 and E X_M^2 = 1 exactly by the definition of a_M, b_M.
inline Moments truncated_moments(const SourceDistribution& f, double M) {
    const auto p = truncation_params(f, M);
    const auto r = detail::raw_truncated_moments(f, M);
    const double a = p.a_M, b = p.b_M;
    // Central moments of X 1{|X|<=M} - a; the j=0 binomial term covers the
    // event |X| > M where the truncated variable equals -a.
    const double c3 = r.r3 - 3.0 * a * r.r2 + 2.0 * a * a * a;
    const double c4 = r.r4 - 4.0 * a * r.r3 + 6.0 * a * a * r.r2 - 3.0 * a * a * a * a;
    Moments m;
    m.m3 = c3 / (b * std::sqrt(b));
    m.m4 = c4 / (b * b);
    m.var_x2 = m.m4 - 1.0;
    return m;
}

inline double apply_truncation(double x, const TruncationParams& p) {
    const double kept = (std::fabs(x) <= p.M) ? x : 0.0;
    return (kept - p.a_M) / std::sqrt(p.b_M);
}

inline std::vector<double> truncate(const std::vector<double>& x, const TruncationParams& p) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = apply_truncation(x[i], p);
    return out;
}

/// count i.i.d. draws, deterministic per (f, count, seed).
inline std::vector<double> draw(const SourceDistribution& f, std::size_t count,
                                std::uint64_t seed) {
    if (count < 1) throw InvalidParameter("draw count must be >= 1");
    Rng rng(child_seed(seed, "draw", 0));
    std::vector<double> out(count);
    for (auto& v : out) v = f.draw_one(rng);
    return out;
}

}  // namespace qflimit
