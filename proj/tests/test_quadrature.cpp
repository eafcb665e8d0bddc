#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "drift_records/quadrature.hpp"

using namespace drift_records;

TEST(Quadrature, SmoothIntegrals) {
    const auto r = quad::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 2.0, 1e-13);
    EXPECT_NEAR(quad::integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0).value, std::sqrt(std::numbers::pi), 1e-13);
}

TEST(Quadrature, EndpointSingularity) {
    const auto r = quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {.abs_tol = 1e-10});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 2.0, 1e-9);
}

TEST(Quadrature, BreakpointsHandleKinks) {
    auto f = [](double x) { return std::abs(x - 0.3) + (x > 0.7 ? 1.0 : 0.0); };
    const std::vector<double> pts{0.0, 0.3, 0.7, 1.0};
    const auto r = quad::integrate(f, pts, {.abs_tol = 1e-14});
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.intervals, 3);
    EXPECT_NEAR(r.value, 0.5 * 0.09 + 0.5 * 0.49 + 0.3, 1e-14);
}

TEST(Quadrature, ReportsNonConvergence) {
    auto f = [](double x) { return std::sin(1.0 / x); };
    const auto r = quad::integrate(f, 1e-6, 1.0, {.abs_tol = 1e-15, .max_intervals = 20});
    EXPECT_FALSE(r.converged);
    EXPECT_THROW(quad::integrate_or_throw(f, 1e-6, 1.0, {.abs_tol = 1e-15, .max_intervals = 20}, "test"),
                 QuadratureError);
    try {
        quad::integrate_or_throw(f, 1e-6, 1.0, {.abs_tol = 1e-15, .max_intervals = 20}, "test");
    } catch (const QuadratureError& e) {
        EXPECT_EQ(e.best_estimate(), r.value);
        EXPECT_GT(e.error_estimate(), 1e-15);
    }
}

TEST(Quadrature, NormalizeBreakpoints) {
    std::vector<double> pts{0.5, -1.0, 0.5, 2.0, 0.25};
    quad::normalize_breakpoints(pts, 0.0, 1.0);
    EXPECT_EQ(pts, (std::vector<double>{0.0, 0.25, 0.5, 1.0}));
}
