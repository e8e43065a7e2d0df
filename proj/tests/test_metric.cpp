#include <gtest/gtest.h>

#include <cmath>

#include "finsler/errors.hpp"
#include "finsler/metric.hpp"

using namespace finsler;

TEST(Homogeneity, EuclideanExact) {
    const MetricSpec s = parse_metric("dim 2; L = sqrt(y1^2 + y2^2)");
    const auto pts = sample_points(s, default_domain(2), 5);
    const auto rep = validate_homogeneity(s, pts, {2.0});
    EXPECT_EQ(rep.max_relative_error, 0.0);
    EXPECT_TRUE(rep.passed);
}

TEST(Homogeneity, RandersSmall) {
    const MetricSpec s = parse_metric("dim 3; randers; a = identity; b1 = 0.5");
    const auto pts = sample_points(s, default_domain(3), 5);
    const auto rep = validate_homogeneity(s, pts, {3.0});
    EXPECT_LT(rep.max_relative_error, 1e-12);
}

TEST(Homogeneity, DegreeTwoFails) {
    const MetricSpec s = parse_metric("dim 2; L = y1^2");
    const ChartPoint p{{0.0, 0.0}, {1.0, 0.0}};
    const auto rep = validate_homogeneity(s, {p}, {2.0});
    EXPECT_FALSE(rep.passed);
    EXPECT_DOUBLE_EQ(rep.max_relative_error, 1.0);
}

TEST(Homogeneity, DomainViolation) {
    const MetricSpec s = parse_metric("dim 2; L = sqrt(y1)");
    const ChartPoint p{{0.0, 0.0}, {-1.0, 0.0}};
    EXPECT_THROW(validate_homogeneity(s, {p}, {2.0}), EvaluationError);
}

TEST(Sampling, Deterministic) {
    ChartDomain d = default_domain(2, 42);
    const auto a = sample_points(d, 5);
    const auto b = sample_points(d, 5);
    ASSERT_EQ(a.size(), 5u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].x, b[i].x);
        EXPECT_EQ(a[i].y, b[i].y);
    }
    d.seed = 43;
    EXPECT_NE(sample_points(d, 5)[0].x, a[0].x);
}

TEST(Sampling, RespectsRadius) {
    ChartDomain d = default_domain(2, 42);
    d.eps_y = 0.1;
    for (const auto& p : sample_points(d, 200)) EXPECT_GE(std::hypot(p.y[0], p.y[1]), 0.1);
}

TEST(Sampling, NonConvexRandersExhausts) {
    const MetricSpec s = parse_metric("dim 3; randers; a = identity; b1 = 1.5");
    EXPECT_THROW(sample_points(s, default_domain(3), 5), DomainExhausted);
}

TEST(Sampling, RejectsTinyBox) {
    ChartDomain d = default_domain(2);
    d.y_box = {{-0.01, 0.01}, {-0.01, 0.01}};
    EXPECT_THROW(sample_points(d, 1), DomainExhausted);
    EXPECT_THROW(sample_points(d, 0), InputError);
}

TEST(Fixtures, AllSample) {
    for (const auto& f : builtin_fixtures()) {
        const auto [spec, dom] = load_metric(f.name);
        const auto pts = sample_points(spec, dom, 10);
        EXPECT_EQ(pts.size(), 10u);
        const auto rep = validate_homogeneity(spec, pts, {0.5, 2.0, 7.3});
        EXPECT_TRUE(rep.passed) << f.name << " " << rep.max_relative_error;
    }
}

TEST(Fixtures, UnknownName) { EXPECT_THROW(load_metric("no-such-metric"), InputError); }
