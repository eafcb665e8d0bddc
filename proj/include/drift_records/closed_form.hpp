#pragma once

// Exact formulas for the Gumbel law, the Dagum family with a = 1 and b = c,
// and the unit Pareto law with c = 1. These are the reference values the
// numerical engines in probability.hpp and correlation.hpp are checked
// against.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "drift_records/errors.hpp"
#include "drift_records/quadrature.hpp"

namespace drift_records::closed_form {

// ---------------------------------------------------------------------------
// Gumbel
// ---------------------------------------------------------------------------

inline double gumbel_p_n_delta(double c, double delta, long n) {
    if (n < 1) throw DomainError("gumbel_p_n_delta: n must be >= 1");
    if (n == 1) return 1.0;
    const double nm1 = static_cast<double>(n - 1);
    if (c == 0.0) return 1.0 / (nm1 * std::exp(delta) + 1.0);
    // 1 - e^{-c} and e^{-c} - e^{-nc} = e^{-c}(1 - e^{-(n-1)c}), via expm1.
    const double one_minus = -std::expm1(-c);
    const double diff = -std::exp(-c) * std::expm1(-nm1 * c);
    return one_minus / (one_minus + std::exp(delta) * diff);
}

inline double gumbel_p_delta(double c, double delta) {
    if (c <= 0.0) return 0.0;
    const double em1 = std::expm1(c);
    return em1 / (em1 + std::exp(delta));
}

/// Limit of l_n(c, delta) as n -> inf; c > 0.
inline double gumbel_l_inf(double c, double delta) {
    if (!(c > 0.0)) throw DomainError("gumbel_l_inf: c must be > 0");
    const double ec = std::exp(c);
    if (delta < 0.0) {
        const double ed = std::exp(delta);
        return (ec + ed - 1.0) * (ec - ed + 1.0) / (ec * ec + ed - 1.0);
    }
    // delta >= 0 form divided through by e^{2 delta} (avoids overflow).
    const double r = std::exp(-delta);
    const double num = ec * (ec * r * r + r - r * r);
    const double den = ec * r - ec * r * r + ec * ec * r * r - r + 1.0;
    return num / den;
}

/// Limit of E[1_{n,delta} 1_{n+1,delta}] as n -> inf; c > 0.
inline double gumbel_joint_limit(double c, double delta) {
    if (!(c > 0.0)) throw DomainError("gumbel_joint_limit: c must be > 0");
    const double ec = std::exp(c);
    const double ed = std::exp(delta);
    const double em1 = std::expm1(c);
    if (delta < 0.0) return em1 * em1 * (ec - ed + 1.0) / ((ec + ed - 1.0) * (ec * ec + ed - 1.0));
    return ec * em1 * em1 / ((ec + ed - 1.0) * (ec * ed - ec + ec * ec - ed + ed * ed));
}

struct GumbelArgmax {
    double delta_star;
    double max_value;
};

/// Maximiser of gumbel_l_inf(c, .) over delta < 0 and the maximum.
/// With s = sqrt(1 - e^{-2c}) the direct forms reduce to
/// delta* = log(s / (1 + s)) and max = 2 / (1 + s), which stay accurate for
/// large c where the raw differences cancel.
inline GumbelArgmax gumbel_l_inf_argmax(double c) {
    if (!(c > 0.0)) throw DomainError("gumbel_l_inf_argmax: c must be > 0");
    const double s = std::sqrt(-std::expm1(-2.0 * c));
    return {std::log(s / (1.0 + s)), 2.0 / (1.0 + s)};
}

// ---------------------------------------------------------------------------
// Dagum (a = 1, b = c)
// ---------------------------------------------------------------------------

struct DagumParams {
    double q;
    long n;

    void validate() const {
        if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("dagum: q must be positive");
        if (n < 2) throw DomainError("dagum: n must be >= 2");
    }
};

namespace detail {

inline constexpr long kMaxExplicitQ = 20;

/// int_0^1 (1 + k z^{1/s})^{-power} dz to relative accuracy rel_tol, with
/// breakpoints on a geometric grid from below the transition z ~ k^{-s} up
/// to 1. A coarse first pass sets the absolute target.
inline double transition_integral(double k, double s, double power, double rel_tol, const char* ctx) {
    std::vector<double> pts;
    if (k > 1.0) {
        const double log_z_star = -s * std::log(k);
        for (double w = log_z_star - 30.0; w < 0.0; w += 0.5) pts.push_back(std::exp(w));
    }
    quad::normalize_breakpoints(pts, 0.0, 1.0);
    auto f = [=](double z) { return std::pow(1.0 + k * std::pow(z, 1.0 / s), -power); };
    const double rough = quad::integrate(f, pts, {.abs_tol = 0.0, .max_intervals = 1}).value;
    const double target = std::max(rel_tol * std::abs(rough), std::numeric_limits<double>::min());
    return quad::integrate_or_throw(f, pts, {.abs_tol = target, .max_intervals = 20000}, ctx).value;
}

}  // namespace detail

/// p^{(q)}_{n,0}. Integer q (exactly integral, up to 20) uses the binomial
/// expansion with the (-1)^{q-1} log n term; other q integrate
/// q/(n-1)^q int_1^n (y-1)^{q-1}/y dy after the substitution
/// (y-1)^q = (n-1)^q z, i.e. int_0^1 dz / (1 + (n-1) z^{1/q}).
inline double dagum_p_n0(const DagumParams& p) {
    p.validate();
    const double n = static_cast<double>(p.n);
    const double nm1 = n - 1.0;
    if (p.q == std::floor(p.q) && p.q <= detail::kMaxExplicitQ) {
        const long q = static_cast<long>(p.q);
        const double log_n = std::log(n);
        double sum = ((q - 1) % 2 == 0 ? 1.0 : -1.0) * log_n;
        double binom = 1.0;
        for (long k = 1; k <= q - 1; ++k) {
            binom = binom * static_cast<double>(q - k) / static_cast<double>(k);
            const double sign = ((q - 1 - k) % 2 == 0) ? 1.0 : -1.0;
            sum += binom * sign / static_cast<double>(k) * std::expm1(static_cast<double>(k) * log_n);
        }
        return static_cast<double>(q) * sum / std::pow(nm1, static_cast<double>(q));
    }
    return detail::transition_integral(nm1, p.q, 1.0, 1e-11, "dagum_p_n0");
}

/// Leading-order behaviour of p^{(q)}_{n,0}.
inline double dagum_p_n0_asymptotic(double q, double n) {
    if (!(q > 0.0)) throw DomainError("dagum_p_n0_asymptotic: q must be positive");
    if (!(n > 1.0)) throw DomainError("dagum_p_n0_asymptotic: n must be > 1");
    if (q < 1.0) return std::pow(n, -q) * q * std::tgamma(1.0 - q) * std::tgamma(q);
    if (q == 1.0) return std::log(n) / n;
    return q / ((q - 1.0) * n);
}

/// p^{(q)}_{n,delta} for delta = c:
/// q (n-1)^q / (n-2)^{2q} int_1^{n-1} (y-1)^{2q-1} / y^{q+1} dy, computed
/// after (y-1)^{2q} = (n-2)^{2q} z as
/// ((n-1)^q / 2) int_0^1 (1 + (n-2) z^{1/(2q)})^{-(q+1)} dz.
inline double dagum_p_n_delta_eq_c(double q, long n) {
    if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("dagum_p_n_delta_eq_c: q must be positive");
    if (n <= 2) throw DomainError("dagum_p_n_delta_eq_c: n must be > 2");
    const double nd = static_cast<double>(n);
    const double scale = 0.5 * std::pow(nd - 1.0, q);
    const double integral = detail::transition_integral(nd - 2.0, 2.0 * q, q + 1.0, 1e-11, "dagum_p_n_delta_eq_c");
    return scale * integral;
}

/// Leading-order behaviour of dagum_p_n_delta_eq_c.
inline double dagum_p_n_delta_eq_c_asymptotic(double q, double n) {
    if (!(q > 0.0)) throw DomainError("dagum_p_n_delta_eq_c_asymptotic: q must be positive");
    if (q < 1.0) return std::pow(n, -q) * std::tgamma(2.0 * q) * std::tgamma(1.0 - q) / std::tgamma(q);
    if (q == 1.0) return std::log(n) / n;
    return q / ((q - 1.0) * n);
}

// ---------------------------------------------------------------------------
// Unit Pareto, c = 1
// ---------------------------------------------------------------------------

/// p_{n,delta} = ((n-1) log((n - min(1,delta)) / max(1,delta)) - min(1,delta)(n-1-delta)) / (n-1-delta)^2,
/// and 1/(2(n-1)) at delta = n - 1. Within 10% (relative) of that point the
/// removable 0/0 is summed from its series in x = (n-1-delta)/(n-1):
/// sum_j x^j / (j + 2) / (n-1), or 1 - sum_j x^j / (j + 2) with x = delta - 1
/// when n = 2 and delta < 1.
inline double pareto_p_n_delta(double delta, long n) {
    if (n < 2) throw DomainError("pareto_p_n_delta: n must be >= 2");
    const double nd = static_cast<double>(n);
    const double big_n = nd - 1.0;
    const double eps = big_n - delta;
    if (std::abs(eps) < 0.1 * big_n) {
        // delta < 1 here only for n = 2, where the series alternates.
        const double x = delta >= 1.0 ? eps / big_n : -eps;
        double sum = 0.0, power = 1.0;
        for (int j = 0; j < 40 && std::abs(power) > 1e-18; ++j, power *= x) sum += power / (j + 2.0);
        return delta >= 1.0 ? sum / big_n : 1.0 - sum;
    }
    const double lo = std::min(1.0, delta);
    const double hi = std::max(1.0, delta);
    return (big_n * std::log((nd - lo) / hi) - lo * eps) / (eps * eps);
}

namespace detail {

// Closed-form cases for l_n(1, delta), n > 2, with a = n - delta.

inline double pareto_l_negative(double d, double n) {
    const double a = n - d;
    const double A = (d - 2.0) * (d * (1.0 - a) + (n - 1.0) * std::log(a)) * (n * std::log(a + 1.0) - d * a);
    const double B = -(d * d * d * (n - 2.0) + d - 2.0 * n * n * n - 2.0 * d * d * (n * n - 2.0) +
                       d * (n - 1.0) * (n + 5.0) * n + n + 1.0) *
                     std::log(a + 1.0);
    const double C = (a - 1.0) * std::log(a + 1.0 - d) -
                     (d - 2.0) * a * (d * (a - 1.0) * (a - 1.0) - (n - 1.0) * a * std::log(4.0 * a)) +
                     (1.0 - a) * std::log((a - d + 1.0) * (a + 1.0));
    return (B + C) / A;
}

// 0 < delta < 1. The log(2 - delta) term sits inside the (a - delta) factor
// of B (checked against direct quadrature).
inline double pareto_l_unit_interval(double d, double n) {
    const double a = n - d;
    const double A = (d - 1.0) * (d - 1.0) * (d - a) * (d * (1.0 - a) + (n - 1.0) * std::log(a)) *
                     (-d * a + n * std::log(a + 1.0));
    const double inner = (d - 1.0) * (d * d * (a - 1.0) + (d - 1.0) * (n - 1.0) * std::log((a - d + 1.0) / ((2.0 - d) * a)));
    const double B = (a - d) * (inner - std::log(2.0 - d) * (d * (d + 2.0) - 2.0 * d * n + n - 1.0));
    const double C = (d - 1.0) * (d - 1.0) * (n - 1.0) * std::log(a - d + 1.0);
    return a * a * (B + C) / A;
}

inline double pareto_l_one(double n) {
    const double l = std::log(n - 1.0);
    return (n - 1.0) * (n - 1.0) * ((n - 2.0) * n - 2.0 * (n - 1.0) * l) /
           (2.0 * (n - 2.0) * (-n + (n - 1.0) * l + 2.0) * (-n + n * std::log(n) + 1.0));
}

inline double pareto_l_above_one(double d, double n) {
    const double a = n - d;
    const double ld = std::log(d);
    const double A1 = (d + ld - n * ld - n + (n - 1.0) * std::log(n - 1.0) + 1.0) * (d - 1.0) * (d - 1.0) * (d - a);
    const double A2 = d - n * ld - n + n * std::log(n);
    const double B = ld * (2.0 * d * (d * d + 2.0 * d - 1.0) + (2.0 * d - 1.0) * n * n - 5.0 * d * d * n + n);
    const double C = (d - 1.0) * (d - 1.0) * (n - 1.0) * std::log(n - 1.0) -
                     (a - 1.0) * ((d - 1.0) * (d - a) + (2.0 * d - 1.0) * std::log(2.0 * d - 1.0) * (a - 1.0));
    return a * a * (B + C) / (A1 * A2);
}

inline double pareto_l_raw(double d, double n) {
    if (d < 0.0) return pareto_l_negative(d, n);
    if (d < 1.0) return pareto_l_unit_interval(d, n);
    if (d == 1.0) return pareto_l_one(n);
    return pareto_l_above_one(d, n);
}

// Near the removable points of the delta > 1 formula (n/2, n - 1, n, n + 1)
// numerator and denominator vanish together, to second order at n - 1 and n.
// There l is evaluated by Chebyshev interpolation of the raw formula on
// [s - r, s + r]; the nodes stay at least 0.098 r away from s.
inline constexpr double kParetoWindow = 0.1;
inline constexpr int kParetoNodes = 16;

inline double pareto_l_interpolated(double d, double s, double n) {
    constexpr double r = kParetoWindow;
    double num = 0.0, den = 0.0;
    for (int k = 0; k < kParetoNodes; ++k) {
        const double theta = (2.0 * k + 1.0) * std::numbers::pi / (2.0 * kParetoNodes);
        const double x = s + r * std::cos(theta);
        const double w = ((k % 2 == 0) ? 1.0 : -1.0) * std::sin(theta);
        if (d == x) return pareto_l_above_one(x, n);
        const double t = w / (d - x);
        num += t * pareto_l_above_one(x, n);
        den += t;
    }
    return num / den;
}

}  // namespace detail

/// Dependence index l_n(1, delta) for the unit Pareto law, n > 2. At delta = 0
/// the two branches meet and the value is the mean at delta -+ 1e-7. Within
/// half a window of n/2, n - 1, n or n + 1 the 0/0 in the delta > 1 formula
/// is resolved by interpolation.
inline double pareto_l_n(double delta, long n) {
    if (n <= 2) throw DomainError("pareto_l_n: n must be > 2");
    const double nd = static_cast<double>(n);
    if (delta == 0.0) {
        constexpr double h = 1e-7;
        return 0.5 * (detail::pareto_l_raw(-h, nd) + detail::pareto_l_raw(h, nd));
    }
    if (delta > 1.0)
        for (double s : {0.5 * nd, nd - 1.0, nd, nd + 1.0})
            if (std::abs(delta - s) < 0.5 * detail::kParetoWindow && s - detail::kParetoWindow > 1.0)
                return detail::pareto_l_interpolated(delta, s, nd);
    return detail::pareto_l_raw(delta, nd);
}

}  // namespace drift_records::closed_form
