#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "drift_records/errors.hpp"

namespace drift_records {

/// One left-to-right pass over a sequence. Index 1 is a delta-record by
/// convention; index j >= 2 is one iff y_j > max(y_1..y_{j-1}) + delta
/// (strict, so exact ties never count).
class RecordCounter {
public:
    explicit RecordCounter(double delta) : delta_(delta) {}

    /// Feeds the next observation and returns its indicator.
    bool push(double y) {
        ++index_;
        const bool is_record = index_ == 1 || y > running_max_ + delta_;
        if (index_ == 1 || y > running_max_) running_max_ = y;
        if (is_record) {
            ++count_;
            last_record_ = index_;
        }
        return is_record;
    }

    std::size_t index() const noexcept { return index_; }
    std::size_t count() const noexcept { return count_; }
    /// 1-based index of the latest delta-record (0 before any input).
    std::size_t last_record() const noexcept { return last_record_; }
    double running_max() const noexcept { return running_max_; }
    double delta() const noexcept { return delta_; }

private:
    double delta_;
    double running_max_ = -std::numeric_limits<double>::infinity();
    std::size_t index_ = 0;
    std::size_t count_ = 0;
    std::size_t last_record_ = 0;
};

/// Per-index indicators 1_{j,delta} and running maxima M_j (0-based storage,
/// entry j - 1 describes observation j).
struct RecordFlags {
    std::vector<std::uint8_t> flags;
    std::vector<double> running_max;
    double delta = 0.0;

    std::size_t size() const noexcept { return flags.size(); }
    std::size_t count() const noexcept {
        std::size_t n = 0;
        for (auto f : flags) n += f;
        return n;
    }
};

namespace detail {
inline void require_sequence(std::span<const double> y) {
    if (y.empty()) throw DomainError("record statistics need a nonempty sequence");
    for (double v : y)
        if (!std::isfinite(v)) throw DomainError("record statistics need finite observations");
}
}  // namespace detail

inline RecordFlags delta_record_flags(std::span<const double> y, double delta) {
    detail::require_sequence(y);
    RecordFlags out;
    out.delta = delta;
    out.flags.reserve(y.size());
    out.running_max.reserve(y.size());
    RecordCounter counter(delta);
    for (double v : y) {
        out.flags.push_back(counter.push(v) ? 1 : 0);
        out.running_max.push_back(counter.running_max());
    }
    return out;
}

inline std::size_t count_delta_records(std::span<const double> y, double delta) {
    detail::require_sequence(y);
    RecordCounter counter(delta);
    for (double v : y) counter.push(v);
    return counter.count();
}

/// N_{k,delta} / k for k = 1..n.
inline std::vector<double> running_rate(std::span<const double> y, double delta) {
    detail::require_sequence(y);
    std::vector<double> rate;
    rate.reserve(y.size());
    RecordCounter counter(delta);
    for (double v : y) {
        counter.push(v);
        rate.push_back(static_cast<double>(counter.count()) / static_cast<double>(counter.index()));
    }
    return rate;
}

}  // namespace drift_records
