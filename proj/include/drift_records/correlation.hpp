#pragma once

// Joint probability that observations n and n + 1 are both delta-records, and
// the dependence index l_n = joint / (p_n p_{n+1}).
//
// With s = X_n and P(x) = prod_{j=1}^{n-1} F(x + c j - delta):
//   delta >= 0:  joint = int (1 - F(s - c + delta)) P(s) f(s) ds
//   delta <  0:  joint = int [(1 - F(s - c)) P(s)
//                             + int_{s-c+delta}^{s-c} P(t + c) f(t) dt] f(s) ds
// The second line splits on whether Y_{n+1} lies above or below Y_n. Both
// integrals run in probability space like p_n_delta.

#include <algorithm>
#include <cmath>
#include <vector>

#include "drift_records/errors.hpp"
#include "drift_records/probability.hpp"
#include "drift_records/quadrature.hpp"

namespace drift_records {

enum class JointBranch { NegativeDelta, NonnegativeDelta };

inline const char* to_string(JointBranch b) {
    return b == JointBranch::NegativeDelta ? "negative_delta" : "nonnegative_delta";
}

struct JointProbResult {
    double value = 0.0;
    double abs_error_bound = 0.0;
    JointBranch branch = JointBranch::NonnegativeDelta;
};

struct DependenceIndex {
    double l_n = 0.0;
    double joint = 0.0;
    double p_n = 0.0;
    double p_n1 = 0.0;
    double l_n_error = 0.0;
    double joint_error = 0.0;
    double p_n_error = 0.0;
    double p_n1_error = 0.0;
    JointBranch branch = JointBranch::NonnegativeDelta;
};

namespace detail {

inline void push_finite(std::vector<double>& v, double x) {
    if (std::isfinite(x)) v.push_back(x);
}

/// Evaluates the chosen decomposition regardless of the sign of delta; both
/// are exact at delta = 0, which the branch-consistency check relies on.
inline JointProbResult joint_with_branch(const LdmConfig& cfg, long n, double tol, JointBranch branch) {
    const auto& d = cfg.dist;
    const double c = cfg.c;
    const double delta = cfg.delta;
    const long m = n - 1;
    const double lo = d.support_lo();
    const double hi = d.support_hi();

    const double cut = product_lower_cut(cfg, m);
    const auto p_kinks = product_kinks(cfg, m, cut);
    auto log_p = [&](double x) { return log_partial_product(cfg, x, m); };

    std::vector<double> kinks = p_kinks;
    if (branch == JointBranch::NonnegativeDelta) {
        push_finite(kinks, lo + c - delta);
        push_finite(kinks, hi + c - delta);
    } else {
        push_finite(kinks, lo + c);
        push_finite(kinks, hi + c);
        push_finite(kinks, lo + c - delta);
        push_finite(kinks, hi + c - delta);
        push_finite(kinks, cut - delta);
        for (double k : p_kinks) kinks.push_back(k - delta);
    }
    const auto grid = make_ugrid(d, cut, kInf, kinks);
    if (grid.empty) return {0.0, 0.0, branch};

    const double inner_tol = tol / 10.0;
    double inner_error = 0.0;

    // Inner breakpoints in v = F(t): where t + c crosses a kink or the cut.
    std::vector<double> inner_marks;
    if (branch == JointBranch::NegativeDelta) {
        for (double k : p_kinks) inner_marks.push_back(d.cdf(k - c));
        if (std::isfinite(cut)) inner_marks.push_back(d.cdf(cut - c));
        std::sort(inner_marks.begin(), inner_marks.end());
    }

    auto integrand = [&](double u) {
        const double s = d.quantile(u);
        const double lp = log_p(s);
        if (branch == JointBranch::NonnegativeDelta) {
            if (lp == -kInf) return 0.0;
            return std::exp(lp + d.log_sf(s - c + delta));
        }
        double value = lp == -kInf ? 0.0 : std::exp(lp + d.log_sf(s - c));
        const double v_lo = std::max(d.cdf(s - c + delta), std::isfinite(cut) ? d.cdf(cut - c) : 0.0);
        const double v_hi = d.cdf(s - c);
        if (v_hi > v_lo) {
            std::vector<double> pts;
            for (double v : inner_marks)
                if (v > v_lo && v < v_hi) pts.push_back(v);
            quad::normalize_breakpoints(pts, v_lo, v_hi);
            auto inner = [&](double v) { return std::exp(log_p(d.quantile(v) + c)); };
            const auto r = quad::integrate(inner, pts, {.abs_tol = inner_tol, .max_intervals = 2000});
            if (!r.converged)
                throw QuadratureError("joint_prob_consecutive: inner quadrature did not reach tolerance", r.value,
                                      r.abs_error);
            inner_error = std::max(inner_error, r.abs_error);
            value += r.value;
        }
        return value;
    };

    const quad::Options opt{.abs_tol = std::max(0.5 * tol, tol - inner_tol - 10.0 * grid.truncated_mass),
                            .max_intervals = 4000};
    const auto r = quad::integrate_or_throw(integrand, grid.points, opt, "joint_prob_consecutive");
    return {std::clamp(r.value, 0.0, 1.0), r.abs_error + inner_error + grid.truncated_mass, branch};
}

}  // namespace detail

/// P[observations n and n + 1 are both delta-records].
inline JointProbResult joint_prob_consecutive(const LdmConfig& cfg, long n, double tol = kDefaultTol) {
    cfg.validate();
    if (n < 1) throw DomainError("joint_prob_consecutive: n must be >= 1");
    if (!(tol > 0.0)) throw DomainError("joint_prob_consecutive: tol must be positive");
    const auto branch = cfg.delta < 0.0 ? JointBranch::NegativeDelta : JointBranch::NonnegativeDelta;
    if (n == 1) {
        // Observation 1 is always a record.
        const auto p2 = p_n_delta(cfg, 2, tol);
        return {p2.value, p2.abs_error_bound, branch};
    }
    return detail::joint_with_branch(cfg, n, tol, branch);
}

/// l_n(c, delta) with a first-order error bound. Throws IllConditionedError
/// when either marginal is at most 10 tol.
inline DependenceIndex dependence_index(const LdmConfig& cfg, long n, double tol = kDefaultTol) {
    cfg.validate();
    if (n < 1) throw DomainError("dependence_index: n must be >= 1");
    const auto pn = p_n_delta(cfg, n, tol);
    const auto pn1 = p_n_delta(cfg, n + 1, tol);
    if (!(pn.value > 10.0 * tol) || !(pn1.value > 10.0 * tol))
        throw IllConditionedError("dependence_index: marginal probability below 10*tol");
    const auto joint = joint_prob_consecutive(cfg, n, tol);
    DependenceIndex out;
    out.joint = joint.value;
    out.p_n = pn.value;
    out.p_n1 = pn1.value;
    out.joint_error = joint.abs_error_bound;
    out.p_n_error = pn.abs_error_bound;
    out.p_n1_error = pn1.abs_error_bound;
    out.branch = joint.branch;
    out.l_n = joint.value / (pn.value * pn1.value);
    out.l_n_error = out.joint_error / (pn.value * pn1.value) +
                    std::abs(out.l_n) * (out.p_n_error / pn.value + out.p_n1_error / pn1.value);
    return out;
}

}  // namespace drift_records
