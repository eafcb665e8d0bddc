#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "drift_records/closed_form.hpp"
#include "drift_records/probability.hpp"
#include "oracle.hpp"

using namespace drift_records;

namespace {

// prod_{i=1}^{n-1} F(x + c i - delta) f(x), integrated in x with fixed panels.
double oracle_p_n(const LdmConfig& cfg, long n, double lo, double hi, std::vector<double> extra_cuts = {}) {
    auto f = [&](double x) {
        double p = cfg.dist.pdf(x);
        for (long i = 1; i < n && p > 0.0; ++i) p *= cfg.dist.cdf(x + cfg.c * i - cfg.delta);
        return p;
    };
    std::vector<double> cuts{lo, hi};
    for (double k : extra_cuts)
        if (k > lo && k < hi) cuts.push_back(k);
    std::sort(cuts.begin(), cuts.end());
    return oracle::integrate(f, cuts, 400);
}

}  // namespace

TEST(Probability, FirstObservationIsAlwaysARecord) {
    for (const auto& d : {Distribution::gumbel(), Distribution::pareto_unit(), Distribution::uniform(0, 1)}) {
        const auto r = p_n_delta({d, -3.0, 7.0}, 1);
        EXPECT_EQ(r.value, 1.0);
        EXPECT_EQ(r.abs_error_bound, 0.0);
        EXPECT_EQ(r.truncation_n, 0);
    }
}

TEST(Probability, GumbelMatchesClosedForm) {
    const LdmConfig cfg{Distribution::gumbel(), std::log(2.0), 0.0};
    const auto r = p_n_delta(cfg, 5);
    EXPECT_NEAR(r.value, closed_form::gumbel_p_n_delta(std::log(2.0), 0.0, 5), 1e-8);
    EXPECT_LE(r.abs_error_bound, kDefaultTol);
    EXPECT_EQ(r.truncation_n, 4);
}

TEST(Probability, ParetoSecondObservation) {
    EXPECT_NEAR(p_n_delta({Distribution::pareto_unit(), 1.0, 0.0}, 2).value, std::log(2.0), 1e-8);
}

TEST(Probability, ClassicalRecordsAreOneOverN) {
    for (const auto& d : {Distribution::normal(0, 1), Distribution::uniform(-2, 5), Distribution::exponential(3.0),
                          Distribution::dagum(1.0, 0.5)}) {
        for (long n : {2L, 7L, 30L}) EXPECT_NEAR(p_n_delta({d, 0.0, 0.0}, n).value, 1.0 / n, 1e-8) << d.spec();
    }
}

TEST(Probability, MatchesXSpaceOracle) {
    {
        const LdmConfig cfg{Distribution::normal(0.5, 1.5), 0.4, 0.3};
        EXPECT_NEAR(p_n_delta(cfg, 12).value, oracle_p_n(cfg, 12, -12.0, 14.0), 1e-9);
    }
    {
        const LdmConfig cfg{Distribution::exponential(2.0), -0.2, -0.5};
        std::vector<double> kinks;
        for (int i = 1; i < 9; ++i) kinks.push_back(0.2 * i - 0.5);
        EXPECT_NEAR(p_n_delta(cfg, 9).value, oracle_p_n(cfg, 9, 0.0, 25.0, kinks), 1e-9);
    }
    {
        const LdmConfig cfg{Distribution::uniform(0.0, 1.0), 0.15, 0.2};
        std::vector<double> kinks;
        for (int i = 1; i < 6; ++i) kinks.push_back(1.0 + 0.2 - 0.15 * i);
        kinks.push_back(0.2 - 0.15);
        EXPECT_NEAR(p_n_delta(cfg, 6).value, oracle_p_n(cfg, 6, 0.0, 1.0, kinks), 1e-10);
    }
    {
        const LdmConfig cfg{Distribution::dagum(0.7, 2.5), 0.7, 0.1};
        EXPECT_NEAR(p_n_delta(cfg, 8).value,
                    oracle::integrate_to_infinity([&](double x) {
                        double p = cfg.dist.pdf(x);
                        for (long i = 1; i < 8; ++i) p *= cfg.dist.cdf(x + 0.7 * i - 0.1);
                        return p;
                    }, 0.0, 400),
                    1e-9);
    }
}

TEST(Probability, ParetoNegativeTrendTelescopes) {
    // c = -1, delta = 0: the product telescopes to (x - n)/(x - 1), so
    // p_n = 1 - (n - 1) log(n / (n - 1)).
    const LdmConfig cfg{Distribution::pareto_unit(), -1.0, 0.0};
    for (long n : {2L, 3L, 10L, 60L}) {
        const double nm1 = static_cast<double>(n - 1);
        EXPECT_NEAR(p_n_delta(cfg, n).value, 1.0 - nm1 * std::log1p(1.0 / nm1), 1e-8) << n;
    }
}

TEST(Probability, NoRecordsBeyondTheGap) {
    // Every later observation would need to beat the first by more than the range.
    const LdmConfig cfg{Distribution::uniform(0.0, 1.0), 1.0, 2.5};
    for (long n : {2L, 5L}) EXPECT_EQ(p_n_delta(cfg, n).value, 0.0);
}

TEST(Probability, AsymptoticExamples) {
    for (double c : {0.1, 1.0, 5.0})
        for (double d : {-3.0, 0.0, 2.0}) {
            const auto r = p_delta({Distribution::pareto_unit(), c, d});
            EXPECT_EQ(r.value, 0.0);
            EXPECT_EQ(r.abs_error_bound, 0.0);
            EXPECT_EQ(r.truncation_n, 0);
        }
    const auto g = p_delta({Distribution::gumbel(), std::log(2.0), 0.0});
    EXPECT_NEAR(g.value, 0.5, 1e-8);
    EXPECT_LE(g.abs_error_bound, kDefaultTol);
    EXPECT_GT(g.truncation_n, 0);
    for (double c : {0.25, 1.0, 3.0}) EXPECT_EQ(p_delta({Distribution::uniform(0, 1), c, 1.0 + c}).value, 0.0);
}

TEST(Probability, AsymptoticZeroTrendFiniteSupport) {
    // c = 0, delta < 0: p_delta = P[X > x+ + delta].
    EXPECT_NEAR(p_delta({Distribution::uniform(0, 1), 0.0, -0.3}).value, 0.3, 1e-15);
    EXPECT_EQ(p_delta({Distribution::uniform(0, 1), 0.0, 0.3}).value, 0.0);
    EXPECT_EQ(p_delta({Distribution::normal(0, 1), 0.0, -0.3}).value, 0.0);
}

TEST(Probability, UniformJumpAtZeroTrend) {
    const auto right = p_delta({Distribution::uniform(0, 1), 1e-3, -0.5});
    EXPECT_NEAR(right.value, 0.5, 0.05);
    EXPECT_EQ(p_delta({Distribution::uniform(0, 1), -1e-3, -0.5}).value, 0.0);
}

TEST(Probability, AsymptoticNormalAgainstLargeN) {
    // For c > 0 and light tails p_n converges quickly; n = 400 is already at the limit.
    const LdmConfig cfg{Distribution::normal(0, 1), 0.5, 0.2};
    const auto lim = p_delta(cfg);
    EXPECT_NEAR(lim.value, p_n_delta(cfg, 400).value, 2e-8);
    EXPECT_LE(lim.abs_error_bound, kDefaultTol);
}

TEST(Probability, Positivity) {
    EXPECT_TRUE(classify_positivity({Distribution::gumbel(), 1.0, 10.0}));
    EXPECT_TRUE(classify_positivity({Distribution::uniform(0, 1), 0.0, -0.5}));
    for (double d : {-5.0, 0.0, 5.0}) EXPECT_FALSE(classify_positivity({Distribution::normal(0, 1), -0.1, d}));
    EXPECT_FALSE(classify_positivity({Distribution::pareto_unit(), 1.0, -1.0}));
    EXPECT_FALSE(classify_positivity({Distribution::dagum(1.0, 2.0), 1.0, -1.0}));
    EXPECT_TRUE(classify_positivity({Distribution::uniform(0, 1), 0.5, 1.49}));
    EXPECT_FALSE(classify_positivity({Distribution::uniform(0, 1), 0.5, 1.5}));
    EXPECT_FALSE(classify_positivity({Distribution::normal(0, 1), 0.0, -1.0}));
    EXPECT_FALSE(classify_positivity({Distribution::uniform(0, 1), 0.0, 0.0}));
}

TEST(Probability, Finiteness) {
    using R = FinitenessReason;
    auto v = classify_finiteness({Distribution::normal(0, 1), -0.05, 0.0});
    EXPECT_EQ(v.verdict, Finiteness::AlmostSurelyFinite);
    EXPECT_EQ(v.reason, R::NegativeTrendFiniteTailMean);

    v = classify_finiteness({Distribution::pareto_unit(), -1.0, 0.0});
    EXPECT_EQ(v.verdict, Finiteness::Infinite);
    EXPECT_EQ(v.reason, R::InfiniteTailMean);

    // Integrand is the constant e^{-delta}.
    v = classify_finiteness({Distribution::exponential(1.0), 0.0, 1.0});
    EXPECT_EQ(v.verdict, Finiteness::Infinite);
    EXPECT_EQ(v.reason, R::ZeroTrendIntegralDivergent);
    ASSERT_TRUE(v.integral_value.has_value());
    EXPECT_GT(*v.integral_value, 1e12);

    v = classify_finiteness({Distribution::uniform(0, 1), 1.0, 2.0});
    EXPECT_EQ(v.verdict, Finiteness::AlmostSurelyFinite);
    EXPECT_EQ(v.reason, R::PositiveTrendRangeBelowGap);
    v = classify_finiteness({Distribution::uniform(0, 1), 1.0, 1.9});
    EXPECT_EQ(v.reason, R::PositiveTrendRangeAboveGap);
    v = classify_finiteness({Distribution::gumbel(), 0.0, -1.0});
    EXPECT_EQ(v.reason, R::ZeroTrendNonPositiveDelta);
    v = classify_finiteness({Distribution::gumbel(), 0.0, 0.0});
    EXPECT_EQ(v.reason, R::ZeroTrendNonPositiveDelta);
}

TEST(Probability, FinitenessIntegralCases) {
    // Normal tail: integrand decays like x exp(-delta x), so I is finite.
    auto v = classify_finiteness({Distribution::normal(0, 1), 0.0, 1.0});
    EXPECT_EQ(v.verdict, Finiteness::AlmostSurelyFinite);
    EXPECT_EQ(v.reason, FinitenessReason::ZeroTrendIntegralFinite);
    const auto& n = Distribution::normal(0, 1);
    const double ref = oracle::integrate_to_infinity(
        [&](double x) { return std::exp(n.log_sf(x + 1.0) - 2.0 * n.log_sf(x) + n.log_pdf(x)); }, 0.0, 400);
    EXPECT_NEAR(*v.integral_value, ref, 1e-6 * ref);

    // Gumbel: the integrand tends to e^{-delta}; divergent.
    v = classify_finiteness({Distribution::gumbel(), 0.0, 1.0});
    EXPECT_EQ(v.verdict, Finiteness::Infinite);

    // Finite upper end: always finite.
    v = classify_finiteness({Distribution::uniform(0, 1), 0.0, 0.5});
    EXPECT_EQ(v.verdict, Finiteness::AlmostSurelyFinite);
    // int_0^{1/2} (1/2 - x)/(1 - x)^2 dx = log 2 - 1/2
    EXPECT_NEAR(*v.integral_value, std::log(2.0) - 0.5, 1e-9);
}

TEST(Probability, RejectsBadArguments) {
    EXPECT_THROW(p_n_delta({Distribution::gumbel(), 1.0, 0.0}, 0), DomainError);
    EXPECT_THROW(p_n_delta({Distribution::gumbel(), 1.0, 0.0}, 3, 0.0), DomainError);
    EXPECT_THROW(p_n_delta({Distribution::gumbel(), NAN, 0.0}, 3), DomainError);
    EXPECT_THROW(p_delta({Distribution::gumbel(), 1.0, INFINITY}), DomainError);
}

TEST(Probability, QuadratureFailureCarriesEstimate) {
    try {
        p_n_delta({Distribution::gumbel(), 1.0, 0.0}, 50, 1e-300);
        FAIL() << "expected QuadratureError";
    } catch (const QuadratureError& e) {
        EXPECT_NEAR(e.best_estimate(), closed_form::gumbel_p_n_delta(1.0, 0.0, 50), 1e-8);
    }
}
