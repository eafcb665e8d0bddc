#pragma once

// Noise laws for the linear drift model. Every law exposes its cdf, survival
// function and their logarithms (the record products are accumulated in log
// space), the density, an exact quantile, the support endpoints and the
// right-tail metadata that the positivity and finiteness classifiers branch on.

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>

#include "drift_records/errors.hpp"
#include "drift_records/rng.hpp"

namespace drift_records {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Right-tail metadata. mu_plus = integral over (0, inf) of x f(x); +inf for
/// heavy right tails.
struct TailInfo {
    double mu_plus = 0.0;
    bool second_moment_finite = true;

    bool mu_plus_finite() const noexcept { return std::isfinite(mu_plus); }
};

namespace detail {

inline double log1mexp(double a) {
    // log(1 - exp(-a)) for a > 0
    return a < std::numbers::ln2 ? std::log(-std::expm1(-a)) : std::log1p(-std::exp(-a));
}

/// Standard normal upper tail log(1 - Phi(z)), accurate far into the tail.
inline double normal_log_sf(double z) {
    if (z < 30.0) return std::log(0.5 * std::erfc(z / std::numbers::sqrt2));
    const double z2 = z * z;
    const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    return -0.5 * z2 - std::log(z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

/// Standard normal quantile: Acklam's rational approximation refined by one
/// Halley step (close to double precision over (0, 1)).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -kInf;
        if (p == 1.0) return kInf;
        throw DomainError("normal_quantile: p must lie in [0, 1]");
    }
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement against the erfc-based cdf; the residual is taken on
    // the smaller tail so it keeps relative accuracy.
    const double e = (p < 0.5) ? 0.5 * std::erfc(-x / std::numbers::sqrt2) - p
                               : (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

// Euler-Mascheroni constant plus E1(1): the Gumbel right-tail mean.
inline constexpr double kGumbelMuPlus = 0.57721566490153286061 + 0.21938393439552027368;

}  // namespace detail

/// Standard Gumbel, F(x) = exp(-exp(-x)).
struct Gumbel {
    double cdf(double x) const { return std::exp(-std::exp(-x)); }
    double sf(double x) const { return -std::expm1(-std::exp(-x)); }
    double log_cdf(double x) const { return -std::exp(-x); }
    double log_sf(double x) const {
        if (x > 40.0) return -x;
        return detail::log1mexp(std::exp(-x));
    }
    double pdf(double x) const { return std::exp(log_pdf(x)); }
    double log_pdf(double x) const { return -x - std::exp(-x); }
    double quantile(double u) const { return -std::log(-std::log(u)); }
    double support_lo() const { return -kInf; }
    double support_hi() const { return kInf; }
    TailInfo tail_info() const { return {detail::kGumbelMuPlus, true}; }
    double mean() const { return std::numbers::egamma; }
    double variance() const { return std::numbers::pi * std::numbers::pi / 6.0; }
    // sf(s) <= exp(-s), and sf <= 1 below zero.
    double tail_integral_bound(double y) const { return y >= 0.0 ? std::exp(-y) : 1.0 - y; }
    std::string spec() const { return "gumbel"; }
};

/// Unit Pareto, F(x) = 1 - 1/x on x > 1.
struct ParetoUnit {
    double cdf(double x) const { return x > 1.0 ? 1.0 - 1.0 / x : 0.0; }
    double sf(double x) const { return x > 1.0 ? 1.0 / x : 1.0; }
    double log_cdf(double x) const { return x > 1.0 ? std::log1p(-1.0 / x) : -kInf; }
    double log_sf(double x) const { return x > 1.0 ? -std::log(x) : 0.0; }
    double pdf(double x) const { return x > 1.0 ? 1.0 / (x * x) : 0.0; }
    double log_pdf(double x) const { return x > 1.0 ? -2.0 * std::log(x) : -kInf; }
    double quantile(double u) const { return 1.0 / (1.0 - u); }
    double support_lo() const { return 1.0; }
    double support_hi() const { return kInf; }
    TailInfo tail_info() const { return {kInf, false}; }
    double mean() const { return kInf; }
    double variance() const { return kInf; }
    double tail_integral_bound(double) const { return kInf; }
    std::string spec() const { return "pareto1"; }
};

/// Dagum with a = 1: F(x) = (1 + b/x)^(-q) on x > 0.
struct Dagum {
    double b = 1.0;
    double q = 1.0;

    double log_cdf(double x) const { return x > 0.0 ? -q * std::log1p(b / x) : -kInf; }
    double cdf(double x) const { return x > 0.0 ? std::exp(log_cdf(x)) : 0.0; }
    double sf(double x) const { return x > 0.0 ? -std::expm1(log_cdf(x)) : 1.0; }
    double log_sf(double x) const { return x > 0.0 ? detail::log1mexp(-log_cdf(x)) : 0.0; }
    double log_pdf(double x) const {
        if (x <= 0.0) return -kInf;
        return std::log(q * b) + (q - 1.0) * std::log(x) - (q + 1.0) * std::log(x + b);
    }
    double pdf(double x) const { return x > 0.0 ? std::exp(log_pdf(x)) : 0.0; }
    double quantile(double u) const { return b / std::expm1(-std::log(u) / q); }
    double support_lo() const { return 0.0; }
    double support_hi() const { return kInf; }
    TailInfo tail_info() const { return {kInf, false}; }
    double mean() const { return kInf; }
    double variance() const { return kInf; }
    double tail_integral_bound(double) const { return kInf; }
    std::string spec() const {
        std::ostringstream os;
        os.precision(17);
        os << "dagum:b=" << b << ",q=" << q;
        return os.str();
    }
};

struct Normal {
    double mu = 0.0;
    double sigma = 1.0;

    double z(double x) const { return (x - mu) / sigma; }
    double cdf(double x) const { return 0.5 * std::erfc(-z(x) / std::numbers::sqrt2); }
    double sf(double x) const { return 0.5 * std::erfc(z(x) / std::numbers::sqrt2); }
    double log_cdf(double x) const { return detail::normal_log_sf(-z(x)); }
    double log_sf(double x) const { return detail::normal_log_sf(z(x)); }
    double pdf(double x) const { return detail::normal_pdf(z(x)) / sigma; }
    double log_pdf(double x) const {
        const double zz = z(x);
        return -0.5 * zz * zz - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    double quantile(double u) const { return mu + sigma * detail::normal_quantile(u); }
    double support_lo() const { return -kInf; }
    double support_hi() const { return kInf; }
    TailInfo tail_info() const {
        const double r = mu / sigma;
        return {mu * 0.5 * std::erfc(-r / std::numbers::sqrt2) + sigma * detail::normal_pdf(r), true};
    }
    double mean() const { return mu; }
    double variance() const { return sigma * sigma; }
    double tail_integral_bound(double y) const {
        const double zz = z(y);
        return sigma * (detail::normal_pdf(zz) - zz * 0.5 * std::erfc(zz / std::numbers::sqrt2));
    }
    std::string spec() const {
        std::ostringstream os;
        os.precision(17);
        os << "normal:mu=" << mu << ",sigma=" << sigma;
        return os.str();
    }
};

struct Uniform {
    double lo = 0.0;
    double hi = 1.0;

    double width() const { return hi - lo; }
    double cdf(double x) const { return x <= lo ? 0.0 : (x >= hi ? 1.0 : (x - lo) / width()); }
    double sf(double x) const { return x <= lo ? 1.0 : (x >= hi ? 0.0 : (hi - x) / width()); }
    double log_cdf(double x) const { return std::log(cdf(x)); }
    double log_sf(double x) const { return std::log(sf(x)); }
    double pdf(double x) const { return (x >= lo && x <= hi) ? 1.0 / width() : 0.0; }
    double log_pdf(double x) const { return std::log(pdf(x)); }
    double quantile(double u) const { return lo + width() * u; }
    double support_lo() const { return lo; }
    double support_hi() const { return hi; }
    TailInfo tail_info() const {
        const double a = std::max(lo, 0.0);
        const double c = std::max(hi, 0.0);
        return {(c * c - a * a) / (2.0 * width()), true};
    }
    double mean() const { return 0.5 * (lo + hi); }
    double variance() const { return width() * width() / 12.0; }
    double tail_integral_bound(double y) const {
        if (y >= hi) return 0.0;
        if (y >= lo) return (hi - y) * (hi - y) / (2.0 * width());
        return (lo - y) + 0.5 * width();
    }
    std::string spec() const {
        std::ostringstream os;
        os.precision(17);
        os << "uniform:lo=" << lo << ",hi=" << hi;
        return os.str();
    }
};

struct Exponential {
    double rate = 1.0;

    double cdf(double x) const { return x > 0.0 ? -std::expm1(-rate * x) : 0.0; }
    double sf(double x) const { return x > 0.0 ? std::exp(-rate * x) : 1.0; }
    double log_cdf(double x) const { return x > 0.0 ? detail::log1mexp(rate * x) : -kInf; }
    double log_sf(double x) const { return x > 0.0 ? -rate * x : 0.0; }
    double pdf(double x) const { return x >= 0.0 ? rate * std::exp(-rate * x) : 0.0; }
    double log_pdf(double x) const { return x >= 0.0 ? std::log(rate) - rate * x : -kInf; }
    double quantile(double u) const { return -std::log1p(-u) / rate; }
    double support_lo() const { return 0.0; }
    double support_hi() const { return kInf; }
    TailInfo tail_info() const { return {1.0 / rate, true}; }
    double mean() const { return 1.0 / rate; }
    double variance() const { return 1.0 / (rate * rate); }
    double tail_integral_bound(double y) const {
        return y >= 0.0 ? std::exp(-rate * y) / rate : 1.0 / rate - y;
    }
    std::string spec() const {
        std::ostringstream os;
        os.precision(17);
        os << "exp:rate=" << rate;
        return os.str();
    }
};

/// Immutable value type over the built-in laws. Construct through the named
/// factories (or parse_distribution); parameters are validated there.
class Distribution {
public:
    using Law = std::variant<Gumbel, ParetoUnit, Dagum, Normal, Uniform, Exponential>;

    static Distribution gumbel() { return Distribution(Gumbel{}); }
    static Distribution pareto_unit() { return Distribution(ParetoUnit{}); }
    static Distribution dagum(double b, double q) {
        require(b > 0.0 && std::isfinite(b), "dagum: b must be positive and finite");
        require(q > 0.0 && std::isfinite(q), "dagum: q must be positive and finite");
        return Distribution(Dagum{b, q});
    }
    static Distribution normal(double mu, double sigma) {
        require(std::isfinite(mu), "normal: mu must be finite");
        require(sigma > 0.0 && std::isfinite(sigma), "normal: sigma must be positive and finite");
        return Distribution(Normal{mu, sigma});
    }
    static Distribution uniform(double lo, double hi) {
        require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "uniform: need finite lo < hi");
        return Distribution(Uniform{lo, hi});
    }
    static Distribution exponential(double rate) {
        require(rate > 0.0 && std::isfinite(rate), "exp: rate must be positive and finite");
        return Distribution(Exponential{rate});
    }

    template <class F>
    decltype(auto) visit(F&& f) const {
        return std::visit(std::forward<F>(f), law_);
    }

    double cdf(double x) const { return visit([x](const auto& d) { return d.cdf(x); }); }
    double sf(double x) const { return visit([x](const auto& d) { return d.sf(x); }); }
    double log_cdf(double x) const { return visit([x](const auto& d) { return d.log_cdf(x); }); }
    double log_sf(double x) const { return visit([x](const auto& d) { return d.log_sf(x); }); }
    double pdf(double x) const { return visit([x](const auto& d) { return d.pdf(x); }); }
    double log_pdf(double x) const { return visit([x](const auto& d) { return d.log_pdf(x); }); }
    double quantile(double u) const { return visit([u](const auto& d) { return d.quantile(u); }); }
    double support_lo() const { return visit([](const auto& d) { return d.support_lo(); }); }
    double support_hi() const { return visit([](const auto& d) { return d.support_hi(); }); }
    TailInfo tail_info() const { return visit([](const auto& d) { return d.tail_info(); }); }
    double mean() const { return visit([](const auto& d) { return d.mean(); }); }
    double variance() const { return visit([](const auto& d) { return d.variance(); }); }
    /// Upper bound on the integral of sf over (y, inf); +inf for heavy tails.
    double tail_integral_bound(double y) const {
        return visit([y](const auto& d) { return d.tail_integral_bound(y); });
    }
    std::string spec() const { return visit([](const auto& d) { return d.spec(); }); }

    /// Inverse-transform draw (Box-Muller for the normal law).
    double sample(RngState& rng) const {
        if (const auto* n = std::get_if<Normal>(&law_)) return n->mu + n->sigma * rng.normal();
        return quantile(rng.uniform());
    }

    const Law& law() const noexcept { return law_; }
    template <class T>
    bool is() const noexcept {
        return std::holds_alternative<T>(law_);
    }

private:
    explicit Distribution(Law law) : law_(std::move(law)) {}

    static void require(bool ok, const char* msg) {
        if (!ok) throw DomainError(msg);
    }

    Law law_;
};

/// Parses `gumbel`, `pareto1`, `dagum:b=<v>,q=<v>`, `normal:mu=<v>,sigma=<v>`,
/// `uniform:lo=<v>,hi=<v>` and `exp:rate=<v>`.
inline Distribution parse_distribution(std::string_view text) {
    const auto colon = text.find(':');
    const std::string kind(text.substr(0, colon));
    std::map<std::string, double> params;
    if (colon != std::string_view::npos) {
        std::string_view rest = text.substr(colon + 1);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string_view item = rest.substr(0, comma);
            const auto eq = item.find('=');
            if (eq == std::string_view::npos || eq == 0)
                throw DomainError("distribution parameter '" + std::string(item) + "' is not key=value");
            const std::string key(item.substr(0, eq));
            const std::string value(item.substr(eq + 1));
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(value, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != value.size() || value.empty())
                throw DomainError("distribution parameter '" + key + "' has non-numeric value '" + value + "'");
            if (!params.emplace(key, v).second) throw DomainError("duplicate distribution parameter '" + key + "'");
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
    }
    auto take = [&](const char* key) {
        const auto it = params.find(key);
        if (it == params.end()) throw DomainError("distribution '" + kind + "' requires parameter '" + key + "'");
        const double v = it->second;
        params.erase(it);
        return v;
    };
    auto finish = [&](Distribution d) {
        if (!params.empty())
            throw DomainError("unknown parameter '" + params.begin()->first + "' for distribution '" + kind + "'");
        return d;
    };
    if (kind == "gumbel") return finish(Distribution::gumbel());
    if (kind == "pareto1") return finish(Distribution::pareto_unit());
    if (kind == "dagum") {
        const double b = take("b");
        const double q = take("q");
        return finish(Distribution::dagum(b, q));
    }
    if (kind == "normal") {
        const double mu = take("mu");
        const double sigma = take("sigma");
        return finish(Distribution::normal(mu, sigma));
    }
    if (kind == "uniform") {
        const double lo = take("lo");
        const double hi = take("hi");
        return finish(Distribution::uniform(lo, hi));
    }
    if (kind == "exp") return finish(Distribution::exponential(take("rate")));
    throw DomainError("unknown distribution '" + kind + "'");
}

}  // namespace drift_records
