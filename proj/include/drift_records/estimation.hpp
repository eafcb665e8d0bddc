#pragma once

// Long-run variance of the delta-record count: the lag-window estimator from
// an observed indicator sequence, a Monte Carlo estimate of the limit, and
// the Gaussian interval for N_{n,delta}.

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "drift_records/distributions.hpp"
#include "drift_records/errors.hpp"
#include "drift_records/probability.hpp"
#include "drift_records/record_core.hpp"
#include "drift_records/rng.hpp"
#include "drift_records/simulator.hpp"

namespace drift_records {

struct VarianceEstimate {
    /// gamma(0) + 2 sum gamma(k), floored at 0.
    double sigma2 = 0.0;
    /// The same sum before flooring.
    double raw_sigma2 = 0.0;
    long m = 0;
    /// gamma(0..m).
    std::vector<double> gammas;
    bool floored = false;
    double p_hat = 0.0;
    long n = 0;
};

inline long default_lag_window(std::size_t n) {
    return static_cast<long>(std::floor(std::sqrt(static_cast<double>(n))));
}

/// gamma(k) = n^{-1} sum_{j=1}^{n-k} (1_j - p)(1_{j+k} - p) with p = N/n.
/// Accepts 0 <= m <= n/2; m = 0 gives the Bernoulli variance p(1 - p).
inline VarianceEstimate variance_estimator(const RecordFlags& flags, long m) {
    const long n = static_cast<long>(flags.size());
    if (n == 0) throw DomainError("variance_estimator: empty flag sequence");
    if (m < 0 || 2 * m > n) throw DomainError("variance_estimator: need 0 <= m <= n/2");
    VarianceEstimate v;
    v.n = n;
    v.m = m;
    v.p_hat = static_cast<double>(flags.count()) / static_cast<double>(n);
    std::vector<double> centred(static_cast<std::size_t>(n));
    for (long j = 0; j < n; ++j) centred[static_cast<std::size_t>(j)] = flags.flags[static_cast<std::size_t>(j)] - v.p_hat;
    v.gammas.resize(static_cast<std::size_t>(m) + 1);
    for (long k = 0; k <= m; ++k) {
        double s = 0.0;
        for (long j = 0; j + k < n; ++j) s += centred[static_cast<std::size_t>(j)] * centred[static_cast<std::size_t>(j + k)];
        v.gammas[static_cast<std::size_t>(k)] = s / static_cast<double>(n);
    }
    v.raw_sigma2 = v.gammas[0];
    for (long k = 1; k <= m; ++k) v.raw_sigma2 += 2.0 * v.gammas[static_cast<std::size_t>(k)];
    v.floored = v.raw_sigma2 < 0.0;
    v.sigma2 = v.floored ? 0.0 : v.raw_sigma2;
    return v;
}

/// Uses m = floor(sqrt(n)).
inline VarianceEstimate variance_estimator(const RecordFlags& flags) {
    return variance_estimator(flags, std::min(default_lag_window(flags.size()), static_cast<long>(flags.size()) / 2));
}

enum class SummandReading {
    /// p - p^2 + 2 sum (r_m - p^2): the summable long-run variance.
    CenteredCovariance,
    /// p - p^2 + 2 sum (r_m - p), uncentred summands. Kept for audit; it does not converge in lag_max.
    Verbatim,
};

struct AsymptoticVarianceConfig {
    LdmConfig ldm;
    long horizon = 10'000;
    long burn_in = 1'000;
    long lag_max = 50;
    long replications = 200;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    SummandReading reading = SummandReading::CenteredCovariance;
};

struct AsymptoticVarianceResult {
    double sigma2 = 0.0;
    double raw_sigma2 = 0.0;
    bool floored = false;
    double p_hat = 0.0;
    /// Pooled r_m = E[1_j 1_{j+m}] for m = 1..lag_max.
    std::vector<double> r_hat;
    /// Pooled centred lag-m covariances for m = 0..lag_max.
    std::vector<double> covariances;
};

namespace detail {

struct LagSums {
    double ones = 0.0;
    std::vector<double> products;  // sum_j I_j I_{j+m}
    std::vector<double> heads;     // sum_{j <= H-m} I_j
    std::vector<double> tails;     // sum_{j > m} I_j
};

inline LagSums lag_sums(const AsymptoticVarianceConfig& cfg, long replication) {
    RngState rng(cfg.seed, static_cast<std::uint64_t>(replication));
    RecordCounter counter(cfg.ldm.delta);
    const long total = cfg.burn_in + cfg.horizon;
    std::vector<std::uint8_t> ind;
    ind.reserve(static_cast<std::size_t>(cfg.horizon));
    for (long j = 1; j <= total; ++j) {
        const bool rec = counter.push(cfg.ldm.dist.sample(rng) + cfg.ldm.c * static_cast<double>(j));
        if (j > cfg.burn_in) ind.push_back(rec ? 1 : 0);
    }
    const long h = cfg.horizon;
    LagSums s;
    s.products.assign(static_cast<std::size_t>(cfg.lag_max) + 1, 0.0);
    s.heads.assign(static_cast<std::size_t>(cfg.lag_max) + 1, 0.0);
    s.tails.assign(static_cast<std::size_t>(cfg.lag_max) + 1, 0.0);
    std::vector<long> prefix(static_cast<std::size_t>(h) + 1, 0);
    for (long j = 0; j < h; ++j) prefix[static_cast<std::size_t>(j) + 1] = prefix[static_cast<std::size_t>(j)] + ind[static_cast<std::size_t>(j)];
    s.ones = static_cast<double>(prefix.back());
    for (long m = 0; m <= cfg.lag_max; ++m) {
        long p = 0;
        for (long j = 0; j + m < h; ++j) p += ind[static_cast<std::size_t>(j)] & ind[static_cast<std::size_t>(j + m)];
        s.products[static_cast<std::size_t>(m)] = static_cast<double>(p);
        s.heads[static_cast<std::size_t>(m)] = static_cast<double>(prefix[static_cast<std::size_t>(h - m)]);
        s.tails[static_cast<std::size_t>(m)] = static_cast<double>(prefix.back() - prefix[static_cast<std::size_t>(m)]);
    }
    return s;
}

}  // namespace detail

/// Monte Carlo estimate of the CLT variance sigma^2_delta from post-burn-in
/// indicators pooled over replications, truncated at lag_max and floored at 0.
inline AsymptoticVarianceResult asymptotic_variance_mc(const AsymptoticVarianceConfig& cfg) {
    cfg.ldm.validate();
    if (cfg.horizon < 2) throw DomainError("asymptotic_variance_mc: horizon must be >= 2");
    if (cfg.burn_in < 0) throw DomainError("asymptotic_variance_mc: burn_in must be >= 0");
    if (cfg.lag_max < 0 || cfg.lag_max >= cfg.horizon) throw DomainError("asymptotic_variance_mc: need 0 <= lag_max < horizon");
    if (cfg.replications < 1) throw DomainError("asymptotic_variance_mc: replications must be >= 1");

    const auto parts = run_replications(cfg.replications, cfg.workers, [&](long r) { return detail::lag_sums(cfg, r); });
    const std::size_t lags = static_cast<std::size_t>(cfg.lag_max) + 1;
    double ones = 0.0;
    std::vector<double> prod(lags, 0.0), heads(lags, 0.0), tails(lags, 0.0);
    for (const auto& s : parts) {
        ones += s.ones;
        for (std::size_t m = 0; m < lags; ++m) {
            prod[m] += s.products[m];
            heads[m] += s.heads[m];
            tails[m] += s.tails[m];
        }
    }
    const double reps = static_cast<double>(cfg.replications);
    const double h = static_cast<double>(cfg.horizon);
    AsymptoticVarianceResult out;
    const double p = ones / (reps * h);
    out.p_hat = p;
    out.covariances.resize(lags);
    out.r_hat.resize(lags - 1);
    for (std::size_t m = 0; m < lags; ++m) {
        const double pairs = reps * (h - static_cast<double>(m));
        out.covariances[m] = (prod[m] - p * (heads[m] + tails[m])) / pairs + p * p;
        if (m > 0) out.r_hat[m - 1] = prod[m] / pairs;
    }
    double total = p - p * p;
    for (std::size_t m = 1; m < lags; ++m) {
        if (cfg.reading == SummandReading::CenteredCovariance)
            total += 2.0 * out.covariances[m];
        else
            total += 2.0 * (out.r_hat[m - 1] - p);
    }
    out.raw_sigma2 = total;
    out.floored = total < 0.0;
    out.sigma2 = out.floored ? 0.0 : total;
    return out;
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Central `level` interval of Normal(n p_hat, n sigma2).
inline Interval gaussian_interval(long n, double p_hat, double sigma2, double level) {
    if (!(level > 0.0 && level < 1.0)) throw DomainError("gaussian_interval: level must lie in (0, 1)");
    if (n < 1) throw DomainError("gaussian_interval: n must be >= 1");
    if (!(sigma2 >= 0.0)) throw DomainError("gaussian_interval: sigma2 must be >= 0");
    const double centre = static_cast<double>(n) * p_hat;
    const double z = detail::normal_quantile(0.5 + 0.5 * level);
    const double half = z * std::sqrt(static_cast<double>(n) * sigma2);
    return {centre - half, centre + half};
}

}  // namespace drift_records
