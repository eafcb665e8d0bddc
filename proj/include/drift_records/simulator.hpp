#pragma once

// Monte Carlo over LDM paths. Replication r always draws from
// RngState(seed, r), and results are gathered in replication order, so the
// output does not depend on the number of worker threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "drift_records/errors.hpp"
#include "drift_records/probability.hpp"
#include "drift_records/record_core.hpp"
#include "drift_records/rng.hpp"

namespace drift_records {

struct SimulationConfig {
    LdmConfig ldm;
    long n = 1000;
    long replications = 100;
    std::uint64_t seed = 0;
    /// Observations simulated before the counted window. They feed the running
    /// maximum but are not counted, so with burn_in > 0 a count may be 0.
    long burn_in = 0;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned workers = 1;

    void validate() const {
        ldm.validate();
        if (n < 1) throw DomainError("simulation: n must be >= 1");
        if (replications < 1) throw DomainError("simulation: replications must be >= 1");
        if (burn_in < 0) throw DomainError("simulation: burn_in must be >= 0");
    }
};

struct SimSummary {
    std::vector<long> counts;
    /// Index (1-based, within the counted window) of the last delta-record; 0 if none.
    std::vector<long> last_record;
    double mean_rate = 0.0;
    double rate_stderr = 0.0;
    double mean_count = 0.0;
    double count_stderr = 0.0;
    /// sqrt(n) (N_n / n - mean_rate) per replication.
    std::vector<double> standardized;
    /// Fraction of replications whose last delta-record falls in the first half.
    double stabilization_fraction = 0.0;
};

/// Runs fn(r) for r = 0..count-1 on up to `workers` threads and returns the
/// results in index order. The first exception thrown by any task is rethrown.
template <class Fn>
auto run_replications(long count, unsigned workers, Fn&& fn) -> std::vector<decltype(fn(0L))> {
    using T = decltype(fn(0L));
    std::vector<T> out(static_cast<std::size_t>(count));
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<long>(workers, count));
    if (workers <= 1) {
        for (long r = 0; r < count; ++r) out[static_cast<std::size_t>(r)] = fn(r);
        return out;
    }
    std::atomic<long> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (long r = next++; r < count; r = next++) {
            try {
                out[static_cast<std::size_t>(r)] = fn(r);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return out;
}

/// Y_j = X_j + c j for j = 1..n.
inline std::vector<double> simulate_ldm(const LdmConfig& ldm, long n, RngState& rng) {
    ldm.validate();
    if (n < 0) throw DomainError("simulate_ldm: n must be >= 0");
    std::vector<double> y(static_cast<std::size_t>(n));
    for (long j = 1; j <= n; ++j) y[static_cast<std::size_t>(j - 1)] = ldm.dist.sample(rng) + ldm.c * static_cast<double>(j);
    return y;
}

namespace detail {

struct ReplicationOutcome {
    long count = 0;
    long last_record = 0;
};

/// Streams one path through a RecordCounter without storing it.
inline ReplicationOutcome run_one(const SimulationConfig& cfg, long replication) {
    RngState rng(cfg.seed, static_cast<std::uint64_t>(replication));
    RecordCounter counter(cfg.ldm.delta);
    const long total = cfg.burn_in + cfg.n;
    ReplicationOutcome out;
    for (long j = 1; j <= total; ++j) {
        const double y = cfg.ldm.dist.sample(rng) + cfg.ldm.c * static_cast<double>(j);
        if (counter.push(y) && j > cfg.burn_in) {
            ++out.count;
            out.last_record = j - cfg.burn_in;
        }
    }
    return out;
}

inline SimSummary summarize(const SimulationConfig& cfg, const std::vector<ReplicationOutcome>& runs) {
    SimSummary s;
    const double n = static_cast<double>(cfg.n);
    const double reps = static_cast<double>(runs.size());
    s.counts.reserve(runs.size());
    s.last_record.reserve(runs.size());
    double sum = 0.0;
    long stable = 0;
    for (const auto& r : runs) {
        s.counts.push_back(r.count);
        s.last_record.push_back(r.last_record);
        sum += static_cast<double>(r.count);
        if (2 * r.last_record <= cfg.n) ++stable;
    }
    s.mean_count = sum / reps;
    double ss = 0.0;
    for (const auto& r : runs) ss += (static_cast<double>(r.count) - s.mean_count) * (static_cast<double>(r.count) - s.mean_count);
    const double sd = runs.size() > 1 ? std::sqrt(ss / (reps - 1.0)) : 0.0;
    s.count_stderr = sd / std::sqrt(reps);
    s.mean_rate = s.mean_count / n;
    s.rate_stderr = s.count_stderr / n;
    s.standardized.reserve(runs.size());
    for (const auto& r : runs) s.standardized.push_back(std::sqrt(n) * (static_cast<double>(r.count) / n - s.mean_rate));
    s.stabilization_fraction = static_cast<double>(stable) / reps;
    return s;
}

inline SimSummary run_study(const SimulationConfig& cfg) {
    cfg.validate();
    const auto runs = run_replications(cfg.replications, cfg.workers, [&](long r) { return run_one(cfg, r); });
    return summarize(cfg, runs);
}

}  // namespace detail

/// Per-replication N_{n,delta}; mean rate N/n and its standard error.
inline SimSummary mc_record_rate(const SimulationConfig& cfg) { return detail::run_study(cfg); }

/// Same study read for stabilization: the fraction of paths with no new
/// delta-record after index n/2.
inline SimSummary mc_total_records(const SimulationConfig& cfg) { return detail::run_study(cfg); }

/// sqrt(n) (N_{n,delta}/n - p_ref) per replication.
inline std::vector<double> mc_clt_sample(const SimulationConfig& cfg, double p_ref) {
    const auto s = detail::run_study(cfg);
    const double n = static_cast<double>(cfg.n);
    std::vector<double> z;
    z.reserve(s.counts.size());
    for (long c : s.counts) z.push_back(std::sqrt(n) * (static_cast<double>(c) / n - p_ref));
    return z;
}

}  // namespace drift_records
