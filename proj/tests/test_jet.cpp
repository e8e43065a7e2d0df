#include <gtest/gtest.h>

#include <cmath>

#include "finsler/errors.hpp"
#include "finsler/jet.hpp"
#include "finsler/metric.hpp"

using namespace finsler;

namespace {

MultiIndex mi(std::vector<int> a, std::vector<int> b) { return {std::move(a), std::move(b)}; }

}  // namespace

TEST(Jet, Polynomial) {
    const Expr e = parse_expression("y1^2", 2);
    const JetTable t = jet_eval(e, {{0.3, 0.1}, {1.7, -2.0}}, {2, 4});
    EXPECT_DOUBLE_EQ(t.at(mi({0, 0}, {2, 0})), 2.0);
    EXPECT_DOUBLE_EQ(t.at(mi({0, 0}, {3, 0})), 0.0);
    EXPECT_DOUBLE_EQ(t.at(mi({0, 0}, {1, 0})), 3.4);
}

TEST(Jet, EuclideanEnergy) {
    const MetricSpec s = parse_metric("dim 2; L = sqrt(y1^2 + y2^2)");
    const JetTable t = jet_eval(s.energy_expr(), {{0.2, 0.4}, {0.6, -0.8}}, {2, 4});
    EXPECT_DOUBLE_EQ(t.at(mi({0, 0}, {1, 1})), 0.0);
    EXPECT_DOUBLE_EQ(t.at(mi({0, 0}, {2, 0})), 1.0);
}

TEST(Jet, SphereMixedPartial) {
    const MetricSpec s = parse_metric("dim 2; riemannian; a11 = 1; a22 = sin(x1)^2; a12 = 0");
    const JetTable t = jet_eval(s.energy_expr(), {{0.7, 0.3}, {1.0, 2.0}}, {2, 4});
    EXPECT_NEAR(t.at(mi({1, 0}, {0, 2})), 2 * std::sin(0.7) * std::cos(0.7), 1e-15);
}

TEST(Jet, OrderBounds) {
    const Expr e = parse_expression("y1^2", 2);
    EXPECT_THROW(jet_eval(e, {{0, 0}, {1, 1}}, {3, 4}), OrderOverflow);
    EXPECT_THROW(jet_eval(e, {{0, 0}, {1, 1}}, {2, 6}), OrderOverflow);
    const JetTable t = jet_eval(e, {{0, 0}, {1, 1}}, {1, 2});
    EXPECT_THROW(t.at(mi({2, 0}, {0, 0})), OrderOverflow);
    EXPECT_THROW(t.at(mi({0, 0}, {2, 1})), OrderOverflow);
}

TEST(Jet, DomainErrors) {
    EXPECT_THROW(jet_eval(parse_expression("sqrt(y1)", 2), {{0, 0}, {-1, 1}}, {2, 4}), EvaluationError);
    EXPECT_THROW(jet_eval(parse_expression("log(y1)", 2), {{0, 0}, {0, 1}}, {2, 4}), EvaluationError);
    EXPECT_THROW(jet_eval(parse_expression("1/(y1 - 1)", 2), {{0, 0}, {1, 1}}, {2, 4}), EvaluationError);
}

TEST(Jet, CompositionsMatchClosedForms) {
    const ChartPoint p{{0.4, -0.2}, {0.9, 1.3}};
    const double u = 0.4 * 0.9;
    auto d = [&](const char* s, std::vector<int> b) {
        return jet_eval(parse_expression(s, 2), p, {2, 5}).at(mi({0, 0}, std::move(b)));
    };
    // d^k/dy1^k f(x1*y1) = x1^k f^(k)
    const double x = 0.4;
    EXPECT_NEAR(d("exp(x1*y1)", {5, 0}), std::pow(x, 5) * std::exp(u), 1e-14);
    EXPECT_NEAR(d("sin(x1*y1)", {3, 0}), -std::pow(x, 3) * std::cos(u), 1e-14);
    EXPECT_NEAR(d("cos(x1*y1)", {4, 0}), std::pow(x, 4) * std::cos(u), 1e-14);
    EXPECT_NEAR(d("log(x1*y1)", {3, 0}), 2.0 / std::pow(0.9, 3), 1e-12);
    EXPECT_NEAR(d("(x1*y1)^1.5", {2, 0}), 0.75 * x * x / std::sqrt(u), 1e-13);
    EXPECT_NEAR(d("1/y2", {0, 4}), 24.0 / std::pow(1.3, 5), 1e-12);
    EXPECT_NEAR(d("(y1 - 3)^3", {0, 0}), std::pow(0.9 - 3, 3), 1e-12);
}

TEST(Jet, Linearity) {
    const ChartPoint p{{0.4, -0.2}, {0.9, 1.3}};
    const Expr f = parse_expression("sin(x1*y2)*sqrt(y1^2 + y2^2)", 2);
    const Expr g = parse_expression("exp(x2)*y1^3/y2", 2);
    const Expr h = Expr::constant(2.0) * f + Expr::constant(-3.0) * g;
    const auto tf = jet_eval(f, p, {2, 4});
    const auto tg = jet_eval(g, p, {2, 4});
    const auto th = jet_eval(h, p, {2, 4});
    for (std::size_t k = 0; k < th.values().size(); ++k)
        EXPECT_NEAR(th.values()[k], 2.0 * tf.values()[k] - 3.0 * tg.values()[k],
                    1e-14 * (1 + std::abs(th.values()[k])));
}

TEST(Jet, EulerRelation) {
    for (const auto& f : builtin_fixtures()) {
        const auto [spec, dom] = load_metric(f.name);
        for (const auto& p : sample_points(spec, dom, 5)) {
            const auto t = jet_eval(spec.energy_expr(), p, {2, 4});
            double lhs = 0.0;
            const int n = spec.dim;
            for (int k = 0; k < n; ++k) {
                MultiIndex idx{std::vector<int>(n, 0), std::vector<int>(n, 0)};
                idx.beta[static_cast<std::size_t>(k)] = 1;
                lhs += p.y[static_cast<std::size_t>(k)] * t.at(idx);
            }
            const double e = t.at({std::vector<int>(n, 0), std::vector<int>(n, 0)});
            EXPECT_NEAR(lhs, 2 * e, 1e-10 * std::abs(2 * e)) << f.name;
        }
    }
}

TEST(FiniteDifference, Basics) {
    const Expr s = parse_expression("sin(x1)", 1 + 1);
    EXPECT_NEAR(fd_derivative(s, {{0.0, 0.0}, {1, 1}}, mi({1, 0}, {0, 0})), 1.0, 1e-8);
    const Expr c = Expr::constant(3.0);
    EXPECT_NEAR(fd_derivative(c, {{0.3, 0.0}, {1, 1}}, mi({1, 1}, {1, 0})), 0.0, 1e-10);
    EXPECT_NEAR(fd_derivative(c, {{0.3, 0.0}, {1, 1}}, mi({0, 0}, {4, 0})), 0.0, 1e-10);
}

TEST(FiniteDifference, AgreesWithJetsOnRanders) {
    const auto [spec, dom] = load_metric("randers-n3");
    const Expr e = spec.energy_expr();
    for (const auto& p : sample_points(spec, dom, 3)) {
        const auto t = jet_eval(e, p, {2, 4});
        for (std::size_t k = 0; k < t.indices().size(); ++k) {
            if (t.indices()[k].order() > 3) continue;
            const double fd = fd_derivative(e, p, t.indices()[k]);
            EXPECT_NEAR(fd, t.values()[k], 1e-4 * (1 + std::abs(t.values()[k])));
        }
    }
}
