#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "drift_records/analysis.hpp"
#include "drift_records/probability.hpp"

using namespace drift_records;

namespace {
TimeSeries parse(const std::string& text) {
    std::istringstream in(text);
    return parse_series(in, "mem.csv");
}

std::string parse_error(const std::string& text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e.what();
    }
    return {};
}
}  // namespace

TEST(Parse, MinimalSeries) {
    const auto ts = parse("t,value\n1951,35.2\n1952,36.0\n");
    ASSERT_EQ(ts.size(), 2u);
    EXPECT_EQ(ts.t[1], 1952);
    EXPECT_DOUBLE_EQ(ts.value[0], 35.2);
}

TEST(Parse, ToleratesCrlfBomAndBlankLines) {
    const auto ts = parse("\xEF\xBB\xBFt,value\r\n\r\n1,2.5\r\n 2 , -1e-3 \r\n\n");
    ASSERT_EQ(ts.size(), 2u);
    EXPECT_DOUBLE_EQ(ts.value[1], -1e-3);
}

TEST(Parse, ErrorsNameTheLine) {
    EXPECT_NE(parse_error("t,value\n1951,1\n1951,2\n").find("mem.csv:3:"), std::string::npos);
    EXPECT_NE(parse_error("t,value\n1951,1\n1950,2\n").find("does not increase"), std::string::npos);
    EXPECT_NE(parse_error("t,value\n1951,abc\n").find("mem.csv:2:"), std::string::npos);
    EXPECT_NE(parse_error("t,value\n19x,1\n").find("not an integer"), std::string::npos);
    EXPECT_NE(parse_error("t,value\n1,2,3\n").find("two comma-separated"), std::string::npos);
    EXPECT_NE(parse_error("t,value\n1,nan\n").find("finite"), std::string::npos);
    EXPECT_NE(parse_error("year,value\n1,2\n").find("header"), std::string::npos);
    EXPECT_NE(parse_error("").find("missing header"), std::string::npos);
    EXPECT_THROW(load_series("/nonexistent/file.csv"), ParseError);
}

TEST(Parse, WriteRoundTrip) {
    const auto ts = generate_fixture();
    std::ostringstream out;
    write_series(out, ts);
    const auto back = parse(out.str());
    ASSERT_EQ(back.size(), ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        EXPECT_EQ(back.t[i], ts.t[i]);
        EXPECT_NEAR(back.value[i], ts.value[i], 1e-7);
    }
}

TEST(Ols, RecoversExactLine) {
    TimeSeries ts;
    for (long t = 0; t < 10; ++t) {
        ts.t.push_back(t);
        ts.value.push_back(3.0 - 0.5 * t);
    }
    const auto f = ols_fit(ts);
    EXPECT_NEAR(f.beta0, 3.0, 1e-12);
    EXPECT_NEAR(f.beta1, -0.5, 1e-12);
    EXPECT_NEAR(f.sigma, 0.0, 1e-12);
    EXPECT_NEAR(f.r2, 1.0, 1e-12);
}

TEST(Ols, HandComputedFit) {
    // t = 1..4, y = 1, 3, 2, 5: b1 = 1.1, b0 = 0, SSE = 2.7
    TimeSeries ts{{1, 2, 3, 4}, {1, 3, 2, 5}};
    const auto f = ols_fit(ts);
    EXPECT_NEAR(f.beta1, 1.1, 1e-12);
    EXPECT_NEAR(f.beta0, 0.0, 1e-12);
    EXPECT_NEAR(f.sigma, std::sqrt(2.7 / 2.0), 1e-12);
    EXPECT_NEAR(f.stderr1, std::sqrt(1.35 / 5.0), 1e-12);
    EXPECT_NEAR(f.stderr0, std::sqrt(1.35 * (0.25 + 6.25 / 5.0)), 1e-12);
    EXPECT_NEAR(f.r2, 1.0 - 2.7 / 8.75, 1e-12);
    EXPECT_NEAR(f.adj_r2, 1.0 - (2.7 / 2.0) / (8.75 / 3.0), 1e-12);
    EXPECT_NEAR(f.t_stat1, 1.1 / f.stderr1, 1e-12);
}

TEST(Ols, ResidualsOrthogonalToDesign) {
    const auto f = ols_fit(generate_fixture(5));
    const auto ts = generate_fixture(5);
    double s = 0.0, st = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        s += f.residuals[i];
        st += f.residuals[i] * (ts.t[i] - 1985.0);
    }
    EXPECT_NEAR(s, 0.0, 1e-9);
    EXPECT_NEAR(st, 0.0, 1e-7);
}

TEST(Ols, RejectsDegenerate) {
    EXPECT_THROW(ols_fit(TimeSeries{{1, 2}, {1, 2}}), DomainError);
}

TEST(Fixture, ReproducesCalibration) {
    const auto ts = generate_fixture();
    ASSERT_EQ(ts.size(), 69u);
    EXPECT_EQ(ts.t.front(), 1951);
    EXPECT_EQ(ts.t.back(), 2019);
    const auto f = ols_fit(ts);
    EXPECT_NEAR(f.beta0, -62.659, 1e-8);
    EXPECT_NEAR(f.beta1, 0.0476, 1e-11);
    EXPECT_NEAR(f.stderr1, 0.00915, 1e-11);
}

TEST(Fixture, SeedScore) {
    const auto s = score_fixture(kFixtureSeed);
    EXPECT_EQ(s.count, 17);
    EXPECT_EQ(s.record_count, 7);
    EXPECT_NEAR(s.sigma2_m8, 0.337, 0.01);
    EXPECT_LE(s.spread_m678, 0.05);
}

TEST(Fixture, ShippedFileMatchesGenerator) {
    const auto file = load_series(std::string(DR_SOURCE_DIR) + "/data/synthetic_july_tmax.csv");
    const auto gen = generate_fixture();
    ASSERT_EQ(file.size(), gen.size());
    for (std::size_t i = 0; i < gen.size(); ++i) {
        EXPECT_EQ(file.t[i], gen.t[i]);
        EXPECT_NEAR(file.value[i], gen.value[i], 1e-7);
    }
}

TEST(Analyze, FixtureReport) {
    const auto r = analyze(generate_fixture(), -1.0, 8);
    EXPECT_EQ(r.n, 69);
    EXPECT_EQ(r.count, 17);
    EXPECT_GE(r.count, 12);
    EXPECT_LE(r.count, 22);
    EXPECT_EQ(r.record_count, 7);
    EXPECT_NEAR(r.p_hat, 17.0 / 69.0, 1e-15);
    EXPECT_LT(r.interval.lo, 17.0);
    EXPECT_GT(r.interval.hi, 17.0);
    ASSERT_EQ(r.rate_path.size(), 69u);
    EXPECT_DOUBLE_EQ(r.rate_path.front(), 1.0);
    EXPECT_DOUBLE_EQ(r.rate_path.back(), 17.0 / 69.0);
    EXPECT_EQ(r.diagnostics.autocorrelation.size(), 20u);
    EXPECT_NEAR(r.diagnostics.mean, 0.0, 1e-9);
}

TEST(Analyze, ExtremeThresholds) {
    const auto ts = generate_fixture();
    EXPECT_EQ(analyze(ts, 1e9).count, 1);
    EXPECT_EQ(analyze(ts, -1e9).count, 69);
    EXPECT_THROW(analyze(ts, std::nan("")), DomainError);
}

TEST(Analyze, ShiftInvariance) {
    auto ts = generate_fixture();
    const auto base = analyze(ts, -1.0);
    for (auto& v : ts.value) v += 1000.0;
    const auto shifted = analyze(ts, -1.0);
    EXPECT_EQ(shifted.flags.flags, base.flags.flags);
    EXPECT_NEAR(shifted.fit.beta0, base.fit.beta0 + 1000.0, 1e-7);
    EXPECT_NEAR(shifted.fit.beta1, base.fit.beta1, 1e-10);
}

TEST(Bootstrap, HistogramSummary) {
    const auto ts = generate_fixture();
    const auto fit = ols_fit(ts);
    const auto b = bootstrap_histogram(fit, ts, -1.0, 20'000, 42);
    EXPECT_EQ(std::accumulate(b.histogram.begin(), b.histogram.end(), 0L), 20'000);
    EXPECT_EQ(b.histogram[0], 0);
    EXPECT_LE(b.q025, b.mean);
    EXPECT_GE(b.q975, b.mean);
    // Independent check of the histogram moments.
    double m = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < b.histogram.size(); ++k) {
        m += double(k) * b.histogram[k];
        m2 += double(k) * double(k) * b.histogram[k];
    }
    m /= 20'000.0;
    EXPECT_NEAR(b.mean, m, 1e-12);
    EXPECT_NEAR(b.variance, (m2 - 20'000.0 * m * m) / 19'999.0, 1e-9);
    // The expected count under the fitted model is sum_n p_{n,delta} for
    // Normal(0, sigma) noise with drift beta1 per year.
    double expected = 0.0;
    for (long k = 1; k <= 69; ++k) expected += p_n_delta({Distribution::normal(0, fit.sigma), fit.beta1, -1.0}, k).value;
    EXPECT_NEAR(b.mean, expected, 4.0 * std::sqrt(b.variance / 20'000.0));
    // Within 4 standard errors of the count around the interval centre.
    const auto r = analyze(ts, -1.0);
    EXPECT_NEAR(b.mean, r.n * r.p_hat, 4.0 * std::sqrt(r.n * r.variance.sigma2));
}

TEST(Bootstrap, QuantileRule) {
    const std::vector<long> h{0, 10, 20, 30, 40};
    EXPECT_EQ(histogram_quantile(h, 100, 0.1), 1.0);
    EXPECT_EQ(histogram_quantile(h, 100, 0.11), 2.0);
    EXPECT_EQ(histogram_quantile(h, 100, 0.975), 4.0);
}

TEST(Bootstrap, ParallelReproducible) {
    const auto ts = generate_fixture();
    const auto fit = ols_fit(ts);
    const auto a = bootstrap_histogram(fit, ts, -1.0, 2000, 7, 1);
    const auto b = bootstrap_histogram(fit, ts, -1.0, 2000, 7, 3);
    EXPECT_EQ(a.histogram, b.histogram);
    EXPECT_THROW(bootstrap_histogram(fit, ts, -1.0, 999, 7), DomainError);
}
