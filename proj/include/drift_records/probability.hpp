#pragma once

// Exact and asymptotic delta-record probabilities for Y_n = X_n + c n.
//
// p_{n,delta} = int prod_{i=1}^{n-1} F(x + c i - delta) f(x) dx is computed in
// probability space: substituting u = F(x) turns it into
// int_0^1 prod F(Q(u) + c i - delta) du over a finite interval. Infinite
// support ends are cut at mass 1e-12 and that mass is charged to the error
// bound. Products are accumulated as sums of log F.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "drift_records/distributions.hpp"
#include "drift_records/errors.hpp"
#include "drift_records/quadrature.hpp"

namespace drift_records {

inline constexpr double kDefaultTol = 1e-8;

struct LdmConfig {
    Distribution dist = Distribution::gumbel();
    double c = 0.0;
    double delta = 0.0;

    void validate() const {
        if (!std::isfinite(c)) throw DomainError("trend c must be finite");
        if (!std::isfinite(delta)) throw DomainError("delta must be finite");
    }
};

struct ProbResult {
    double value = 0.0;
    double abs_error_bound = 0.0;
    /// Number of product factors used (largest over quadrature nodes for the
    /// truncated infinite product); 0 when the value is exact.
    long truncation_n = 0;
};

enum class Finiteness { AlmostSurelyFinite, Infinite };

enum class FinitenessReason {
    NegativeTrendFiniteTailMean,    // (i)
    ZeroTrendIntegralFinite,        // (ii)
    PositiveTrendRangeBelowGap,     // (iii)
    InfiniteTailMean,               // mu+ = inf, any c, delta
    ZeroTrendNonPositiveDelta,      // c = 0, delta <= 0
    ZeroTrendIntegralDivergent,     // c = 0, delta > 0, integral = inf
    PositiveTrendRangeAboveGap,     // c > 0, x+ - x- > delta - c
};

struct FinitenessVerdict {
    Finiteness verdict = Finiteness::Infinite;
    FinitenessReason reason = FinitenessReason::InfiniteTailMean;
    /// The c = 0, delta > 0 integral (partial value at the cap when divergent).
    std::optional<double> integral_value;
};

inline const char* to_string(Finiteness f) {
    return f == Finiteness::AlmostSurelyFinite ? "almost_surely_finite" : "infinite";
}

inline const char* to_string(FinitenessReason r) {
    switch (r) {
        case FinitenessReason::NegativeTrendFiniteTailMean: return "negative_trend_finite_tail_mean";
        case FinitenessReason::ZeroTrendIntegralFinite: return "zero_trend_integral_finite";
        case FinitenessReason::PositiveTrendRangeBelowGap: return "positive_trend_range_below_gap";
        case FinitenessReason::InfiniteTailMean: return "infinite_tail_mean";
        case FinitenessReason::ZeroTrendNonPositiveDelta: return "zero_trend_nonpositive_delta";
        case FinitenessReason::ZeroTrendIntegralDivergent: return "zero_trend_integral_divergent";
        case FinitenessReason::PositiveTrendRangeAboveGap: return "positive_trend_range_above_gap";
    }
    return "unknown";
}

namespace detail {

inline constexpr double kMassFloor = 1e-12;
inline constexpr double kLogUnderflow = -745.0;
inline constexpr std::size_t kMaxKinks = 2048;
inline constexpr long kMaxProductFactors = 100'000'000;

/// x_+ - x_- with infinite endpoints handled exactly.
inline double support_range(const Distribution& d) {
    const double lo = d.support_lo();
    const double hi = d.support_hi();
    if (std::isinf(lo) || std::isinf(hi)) return kInf;
    return hi - lo;
}

/// sum_{i=1}^{m} log F(x + c i - delta); -inf as soon as a factor vanishes,
/// early exit once the sum is below double underflow.
inline double log_partial_product(const LdmConfig& cfg, double x, long m) {
    double sum = 0.0;
    for (long i = 1; i <= m; ++i) {
        const double lf = cfg.dist.log_cdf(x + cfg.c * static_cast<double>(i) - cfg.delta);
        if (lf == -kInf) return -kInf;
        sum += lf;
        if (sum < kLogUnderflow) return sum;
    }
    return sum;
}

/// Finite probability-space interval plus breakpoints for an integrand
/// h(Q(u)) that vanishes for x <= lower_cut and x >= upper_cut and has kinks
/// at the given x positions.
struct UGrid {
    std::vector<double> points;
    double truncated_mass = 0.0;
    bool empty = false;
};

inline UGrid make_ugrid(const Distribution& d, double lower_cut, double upper_cut, const std::vector<double>& kinks) {
    UGrid g;
    double u_lo = std::isinf(d.support_lo()) ? kMassFloor : 0.0;
    double u_hi = std::isinf(d.support_hi()) ? 1.0 - kMassFloor : 1.0;
    bool lo_truncated = std::isinf(d.support_lo());
    bool hi_truncated = std::isinf(d.support_hi());
    if (lower_cut > -kInf) {
        const double uc = d.cdf(lower_cut);
        if (uc >= u_lo) {
            u_lo = uc;
            lo_truncated = false;
        }
    }
    if (upper_cut < kInf) {
        const double uc = d.cdf(upper_cut);
        if (uc <= u_hi) {
            u_hi = uc;
            hi_truncated = false;
        }
    }
    g.truncated_mass = (lo_truncated ? kMassFloor : 0.0) + (hi_truncated ? kMassFloor : 0.0);
    if (!(u_hi > u_lo)) {
        g.empty = true;
        g.truncated_mass = 0.0;
        return g;
    }
    g.points.reserve(kinks.size() + 2);
    for (double x : kinks) g.points.push_back(d.cdf(x));
    quad::normalize_breakpoints(g.points, u_lo, u_hi);
    return g;
}

/// Lowest x at which every factor F(x + c i - delta), i = 1..m, is positive.
inline double product_lower_cut(const LdmConfig& cfg, long m) {
    const double lo = cfg.dist.support_lo();
    if (std::isinf(lo) || m == 0) return -kInf;
    const double worst = cfg.c >= 0.0 ? cfg.c : cfg.c * static_cast<double>(m);
    return lo + cfg.delta - worst;
}

/// Points where a factor reaches 1 (finite upper support end only).
inline std::vector<double> product_kinks(const LdmConfig& cfg, long m, double x_lo) {
    std::vector<double> kinks;
    const double hi = cfg.dist.support_hi();
    if (std::isinf(hi)) return kinks;
    for (long i = 1; i <= m && kinks.size() < kMaxKinks; ++i) {
        const double k = hi + cfg.delta - cfg.c * static_cast<double>(i);
        if (cfg.c > 0.0 && k <= x_lo) break;
        kinks.push_back(k);
    }
    return kinks;
}

}  // namespace detail

/// p_delta(c) > 0 iff mu+ < inf and either (c > 0 and delta < x+ - x- + c) or
/// (c = 0, delta < 0 and x+ < inf).
inline bool classify_positivity(const LdmConfig& cfg) {
    cfg.validate();
    if (!cfg.dist.tail_info().mu_plus_finite()) return false;
    if (cfg.c > 0.0) return cfg.delta < detail::support_range(cfg.dist) + cfg.c;
    if (cfg.c == 0.0) return cfg.delta < 0.0 && std::isfinite(cfg.dist.support_hi());
    return false;
}

/// Probability that observation n is a delta-record.
inline ProbResult p_n_delta(const LdmConfig& cfg, long n, double tol = kDefaultTol) {
    cfg.validate();
    if (n < 1) throw DomainError("p_n_delta: n must be >= 1");
    if (!(tol > 0.0)) throw DomainError("p_n_delta: tol must be positive");
    if (n == 1) return {1.0, 0.0, 0};
    const long m = n - 1;
    const double cut = detail::product_lower_cut(cfg, m);
    const auto grid = detail::make_ugrid(cfg.dist, cut, kInf, detail::product_kinks(cfg, m, cut));
    if (grid.empty) return {0.0, 0.0, 0};
    auto integrand = [&](double u) {
        return std::exp(detail::log_partial_product(cfg, cfg.dist.quantile(u), m));
    };
    const quad::Options opt{.abs_tol = std::max(0.5 * tol, tol - 10.0 * grid.truncated_mass)};
    const auto r = quad::integrate_or_throw(integrand, grid.points, opt, "p_n_delta");
    const double value = std::clamp(r.value, 0.0, 1.0);
    return {value, r.abs_error + grid.truncated_mass, m};
}

/// Asymptotic probability p_delta(c) = int prod_{i>=1} F(x + c i - delta) f(x) dx.
///
/// For c > 0 the product at each node stops at the first N with
/// F(x + cN - delta) > 0.999 and (K/c) int_{x+cN-delta}^inf (1 - F) < tol/10,
/// where K = -log(0.999)/0.001 bounds -log F / (1 - F) on the remaining factors.
/// The largest per-node remainder is added to the error bound.
inline ProbResult p_delta(const LdmConfig& cfg, double tol = kDefaultTol) {
    cfg.validate();
    if (!(tol > 0.0)) throw DomainError("p_delta: tol must be positive");
    const bool positive = classify_positivity(cfg);
    if (!positive) return {0.0, 0.0, 0};
    if (cfg.c < 0.0) throw std::logic_error("p_delta: positive probability claimed for c < 0");
    if (cfg.c == 0.0) {
        // The product is the indicator of x >= x+ + delta.
        return {cfg.dist.sf(cfg.dist.support_hi() + cfg.delta), 0.0, 0};
    }
    const double c = cfg.c;
    constexpr double kFloorF = 0.999;
    const double K = -std::log(kFloorF) / (1.0 - kFloorF);
    const double node_tol = tol / 10.0;
    long max_n = 0;
    double max_remainder = 0.0;

    auto integrand = [&](double u) {
        const double x = cfg.dist.quantile(u);
        double sum = 0.0;
        for (long i = 1; i <= detail::kMaxProductFactors; ++i) {
            const double y = x + c * static_cast<double>(i) - cfg.delta;
            const double lf = cfg.dist.log_cdf(y);
            if (lf == -kInf) {
                max_n = std::max(max_n, i);
                return 0.0;
            }
            sum += lf;
            if (sum < detail::kLogUnderflow) {
                max_n = std::max(max_n, i);
                return 0.0;
            }
            if (std::exp(lf) > kFloorF) {
                const double bound = K / c * cfg.dist.tail_integral_bound(y);
                if (bound < node_tol) {
                    max_n = std::max(max_n, i);
                    const double p = std::exp(sum);
                    max_remainder = std::max(max_remainder, p * (-std::expm1(-bound)));
                    return p;
                }
            }
        }
        throw QuadratureError("p_delta: infinite product did not settle", 0.0, 1.0);
    };

    const double cut = detail::product_lower_cut(cfg, 1);
    long kink_factors = 0;
    if (std::isfinite(cfg.dist.support_hi())) {
        const double lo = std::isfinite(cut) ? cut : cfg.dist.quantile(detail::kMassFloor);
        kink_factors = static_cast<long>(std::ceil((cfg.dist.support_hi() + cfg.delta - lo) / c)) + 1;
        kink_factors = std::clamp(kink_factors, 0L, static_cast<long>(detail::kMaxKinks));
    }
    const auto grid = detail::make_ugrid(cfg.dist, cut, kInf, detail::product_kinks(cfg, kink_factors, cut));
    if (grid.empty) return {0.0, 0.0, 0};
    const quad::Options opt{.abs_tol = std::max(0.4 * tol, 0.8 * tol - 10.0 * grid.truncated_mass)};
    const auto r = quad::integrate_or_throw(integrand, grid.points, opt, "p_delta");
    return {std::clamp(r.value, 0.0, 1.0), r.abs_error + grid.truncated_mass + max_remainder, max_n};
}

/// Almost-sure finiteness of the total number of delta-records.
///
/// For c = 0 and delta > 0 the integral
///   I = int_0^inf (1 - F(x + delta)) / (1 - F(x))^2 f(x) dx
/// is accumulated over doubling windows [0, 1], [1, 3], [3, 7], ...: declared
/// divergent once the partial sum exceeds 1e12, convergent once a window adds
/// less than 1e-6 of the running total. Neither within 1e4 windows (or before
/// the window overflows) raises UndecidedError.
inline FinitenessVerdict classify_finiteness(const LdmConfig& cfg, double tol = kDefaultTol) {
    cfg.validate();
    if (!(tol > 0.0)) throw DomainError("classify_finiteness: tol must be positive");
    using R = FinitenessReason;
    const auto& d = cfg.dist;
    if (!d.tail_info().mu_plus_finite()) return {Finiteness::Infinite, R::InfiniteTailMean, {}};
    if (cfg.c < 0.0) return {Finiteness::AlmostSurelyFinite, R::NegativeTrendFiniteTailMean, {}};
    if (cfg.c > 0.0) {
        if (detail::support_range(d) <= cfg.delta - cfg.c)
            return {Finiteness::AlmostSurelyFinite, R::PositiveTrendRangeBelowGap, {}};
        return {Finiteness::Infinite, R::PositiveTrendRangeAboveGap, {}};
    }
    if (cfg.delta <= 0.0) return {Finiteness::Infinite, R::ZeroTrendNonPositiveDelta, {}};

    const double delta = cfg.delta;
    auto integrand = [&](double x) {
        const double log_num = d.log_sf(x + delta);
        if (log_num == -kInf) return 0.0;
        return std::exp(log_num - 2.0 * d.log_sf(x) + d.log_pdf(x));
    };
    const double a = std::max(0.0, d.support_lo());
    if (std::isfinite(d.support_hi())) {
        // Integrand vanishes beyond x+ - delta and the denominator stays away
        // from zero before it.
        const double b = d.support_hi() - delta;
        if (!(b > a)) return {Finiteness::AlmostSurelyFinite, R::ZeroTrendIntegralFinite, 0.0};
        const auto r = quad::integrate_or_throw(integrand, a, b, {.abs_tol = tol}, "classify_finiteness");
        return {Finiteness::AlmostSurelyFinite, R::ZeroTrendIntegralFinite, r.value};
    }

    constexpr double kCap = 1e12;
    constexpr double kRelChange = 1e-6;
    constexpr int kMaxWindows = 10'000;
    double lo = a;
    double width = 1.0;
    double partial = 0.0;
    for (int k = 0; k < kMaxWindows; ++k) {
        const double hi = lo + width;
        if (!std::isfinite(hi)) break;
        const quad::Options opt{.abs_tol = std::max(tol, 1e-9 * partial)};
        const auto r = quad::integrate(integrand, lo, hi, opt);
        if (!r.converged || !std::isfinite(r.value))
            throw UndecidedError("classify_finiteness: window quadrature failed", partial);
        partial += r.value;
        if (partial > kCap) return {Finiteness::Infinite, R::ZeroTrendIntegralDivergent, partial};
        if (k > 0 && r.value <= kRelChange * partial)
            return {Finiteness::AlmostSurelyFinite, R::ZeroTrendIntegralFinite, partial};
        lo = hi;
        width *= 2.0;
    }
    throw UndecidedError("classify_finiteness: integral neither converged nor exceeded the cap", partial);
}

}  // namespace drift_records
