#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace drift_records {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Single-owner random stream. Streams are addressed by (seed, stream index),
/// so replication r of a study always sees the same draws no matter which
/// worker thread runs it.
class RngState {
public:
    explicit RngState(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream), engine_(derive(seed, stream)) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1); both endpoints are excluded so
    /// quantile transforms never see 0 or 1.
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53; }

    /// Standard normal via Box-Muller (cosine branch only, so one call
    /// consumes exactly two uniforms).
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) noexcept {
        return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace drift_records
