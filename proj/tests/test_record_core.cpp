#include <gtest/gtest.h>

#include <vector>

#include "drift_records/record_core.hpp"

using namespace drift_records;

namespace {
std::vector<int> as_ints(const RecordFlags& f) { return {f.flags.begin(), f.flags.end()}; }
}  // namespace

TEST(RecordCore, FlagExamples) {
    const std::vector<double> inc{1, 2, 3}, mixed{3, 1, 2};
    EXPECT_EQ(as_ints(delta_record_flags(inc, 0.0)), (std::vector<int>{1, 1, 1}));
    EXPECT_EQ(as_ints(delta_record_flags(mixed, -1.5)), (std::vector<int>{1, 0, 1}));
    EXPECT_EQ(as_ints(delta_record_flags(mixed, 0.5)), (std::vector<int>{1, 0, 0}));
    EXPECT_EQ(delta_record_flags(mixed, 0.5).running_max, (std::vector<double>{3, 3, 3}));
}

TEST(RecordCore, StrictInequality) {
    const std::vector<double> ties{1.0, 1.0, 2.0, 2.5};
    EXPECT_EQ(as_ints(delta_record_flags(ties, 0.0)), (std::vector<int>{1, 0, 1, 1}));
    EXPECT_EQ(as_ints(delta_record_flags(ties, 0.5)), (std::vector<int>{1, 0, 1, 0}));
}

TEST(RecordCore, RunningMaxIncludesNonRecords) {
    // With delta > 0 a non-record can still raise the maximum.
    // Against the maximum of records only, 0.8 and 1.0 would both qualify.
    const std::vector<double> y{0.0, 0.4, 0.8, 1.0};
    const auto f = delta_record_flags(y, 0.5);
    EXPECT_EQ(as_ints(f), (std::vector<int>{1, 0, 0, 0}));
    EXPECT_EQ(f.running_max, (std::vector<double>{0.0, 0.4, 0.8, 1.0}));
}

TEST(RecordCore, Counts) {
    EXPECT_EQ(count_delta_records(std::vector<double>{1, 2, 3}, 0.0), 3u);
    EXPECT_EQ(count_delta_records(std::vector<double>{42.0}, 1e9), 1u);
    const std::vector<double> y{0.3, -1.0, 2.0, 1.9, 2.05, 5.0, 4.0};
    std::size_t prev = y.size() + 1;
    for (double d = -5.0; d <= 5.0; d += 0.25) {
        const auto c = count_delta_records(y, d);
        EXPECT_LE(c, prev);
        EXPECT_GE(c, 1u);
        prev = c;
    }
}

TEST(RecordCore, RunningRate) {
    EXPECT_EQ(running_rate(std::vector<double>{1, 2, 3}, 0.0), (std::vector<double>{1, 1, 1}));
    const auto r = running_rate(std::vector<double>{3, 1, 2}, 0.5);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_DOUBLE_EQ(r[0], 1.0);
    EXPECT_DOUBLE_EQ(r[1], 0.5);
    EXPECT_DOUBLE_EQ(r[2], 1.0 / 3.0);
    const std::vector<double> y{0.3, -1.0, 2.0, 1.9, 2.05, 5.0, 4.0};
    EXPECT_DOUBLE_EQ(running_rate(y, -0.2).back(), double(count_delta_records(y, -0.2)) / y.size());
}

TEST(RecordCore, CounterMatchesFlags) {
    const std::vector<double> y{0.3, -1.0, 2.0, 1.9, 2.05, 5.0, 4.0};
    RecordCounter c(-0.2);
    const auto f = delta_record_flags(y, -0.2);
    std::size_t last = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        EXPECT_EQ(c.push(y[i]), f.flags[i] == 1);
        if (f.flags[i]) last = i + 1;
    }
    EXPECT_EQ(c.count(), f.count());
    EXPECT_EQ(c.last_record(), last);
    EXPECT_DOUBLE_EQ(c.running_max(), 5.0);
}

TEST(RecordCore, RejectsBadInput) {
    EXPECT_THROW(delta_record_flags(std::vector<double>{}, 0.0), DomainError);
    EXPECT_THROW(count_delta_records(std::vector<double>{1.0, std::nan("")}, 0.0), DomainError);
    EXPECT_THROW(running_rate(std::vector<double>{1.0, INFINITY}, 0.0), DomainError);
}
