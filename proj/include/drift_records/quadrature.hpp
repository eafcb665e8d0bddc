#pragma once

// Globally adaptive 7/15-point Gauss-Kronrod quadrature over a finite,
// piecewise-smooth interval. The caller passes the known non-smooth points as
// breakpoints; the interval with the largest error estimate is bisected until
// the summed estimate meets the absolute tolerance.

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "drift_records/errors.hpp"

namespace drift_records::quad {

struct Options {
    double abs_tol = 1e-10;
    int max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    /// Sum over subintervals of |K15 - G7|.
    double abs_error = 0.0;
    int evaluations = 0;
    int intervals = 0;
    bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
inline constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gauss_kronrod(F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kKronrod[7];
    double gauss = fc * kGauss[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kNodes[j];
        const double sum = f(centre - dx) + f(centre + dx);
        kronrod += kKronrod[j] * sum;
        if (j % 2 == 1) gauss += kGauss[j / 2] * sum;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Integrates f over [points.front(), points.back()], starting from the
/// partition given by the sorted breakpoints. Never throws on
/// non-convergence; inspect Result::converged (or use integrate_or_throw).
template <class F>
Result integrate(F&& f, std::span<const double> points, const Options& opt = {}) {
    Result out;
    if (points.size() < 2) return out;
    std::priority_queue<detail::Segment> heap;
    double total = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i + 1] > points[i])) continue;
        auto s = detail::gauss_kronrod(f, points[i], points[i + 1]);
        out.evaluations += 15;
        total += s.value;
        error += s.error;
        heap.push(s);
    }
    while (!heap.empty() && error > opt.abs_tol && static_cast<int>(heap.size()) < opt.max_intervals) {
        const auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // interval below resolution
        heap.pop();
        const auto left = detail::gauss_kronrod(f, worst.a, mid);
        const auto right = detail::gauss_kronrod(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed the drift of the running updates.
    total = 0.0;
    error = 0.0;
    out.intervals = static_cast<int>(heap.size());
    while (!heap.empty()) {
        total += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    out.value = total;
    out.abs_error = error;
    out.converged = error <= opt.abs_tol;
    return out;
}

template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
    const std::array<double, 2> pts{a, b};
    return integrate(std::forward<F>(f), std::span<const double>(pts), opt);
}

template <class F>
Result integrate_or_throw(F&& f, std::span<const double> points, const Options& opt, const std::string& context) {
    auto r = integrate(std::forward<F>(f), points, opt);
    if (!r.converged)
        throw QuadratureError(context + ": quadrature did not reach tolerance", r.value, r.abs_error);
    return r;
}

template <class F>
Result integrate_or_throw(F&& f, double a, double b, const Options& opt, const std::string& context) {
    const std::array<double, 2> pts{a, b};
    return integrate_or_throw(std::forward<F>(f), std::span<const double>(pts), opt, context);
}

/// Sorts, clips to [lo, hi] and deduplicates a breakpoint list in place,
/// ensuring lo and hi are the first and last entries.
inline void normalize_breakpoints(std::vector<double>& pts, double lo, double hi) {
    std::erase_if(pts, [lo, hi](double p) { return !(p > lo && p < hi); });
    pts.push_back(lo);
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

}  // namespace drift_records::quad
