#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "finsler/errors.hpp"
#include "finsler/expr.hpp"
#include "finsler/metric.hpp"

using namespace finsler;

namespace {

double eval(const std::string& s, std::vector<double> x = {0.7, 0.3}, std::vector<double> y = {1, 2}) {
    return parse_expression(s, 2).evaluate(x, y);
}

}  // namespace

TEST(ExprParse, Precedence) {
    EXPECT_DOUBLE_EQ(eval("1 + 2*3"), 7.0);
    EXPECT_DOUBLE_EQ(eval("-2^2"), -4.0);
    EXPECT_DOUBLE_EQ(eval("(-2)^2"), 4.0);
    EXPECT_DOUBLE_EQ(eval("2^3^2"), 512.0);
    EXPECT_DOUBLE_EQ(eval("8/2/2"), 2.0);
    EXPECT_DOUBLE_EQ(eval("2^-1"), 0.5);
    EXPECT_DOUBLE_EQ(eval("y1 - -y2"), 3.0);
    EXPECT_DOUBLE_EQ(eval("pow(y2, 3)"), 8.0);
    EXPECT_NEAR(eval("sin(x1)^2 + cos(x1)^2"), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(eval("exp(log(y2))"), 2.0);
    EXPECT_DOUBLE_EQ(eval("1.5e1 + .5"), 15.5);
}

TEST(ExprParse, ErrorsCarryPositions) {
    try {
        parse_expression("y1 + * y2", 2);
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.line(), 1u);
        EXPECT_EQ(e.column(), 6u);
        EXPECT_FALSE(e.expected().empty());
    }
    EXPECT_THROW(parse_expression("foo(y1)", 2), UnknownSymbol);
    EXPECT_THROW(parse_expression("y3", 2), DimensionMismatch);
    EXPECT_THROW(parse_expression("x0", 2), DimensionMismatch);
    EXPECT_THROW(parse_expression("y1^x1", 2), SyntaxError);
    EXPECT_THROW(parse_expression("(y1", 2), SyntaxError);
    EXPECT_THROW(parse_expression("y1 $", 2), SyntaxError);
}

TEST(ExprEval, DomainErrors) {
    EXPECT_THROW(eval("sqrt(-y1)"), EvaluationError);
    EXPECT_THROW(eval("log(y1 - 1)"), EvaluationError);
    EXPECT_THROW(eval("y1/(y2 - 2)"), EvaluationError);
    EXPECT_THROW(eval("(-y1)^0.5"), EvaluationError);
}

TEST(ExprPrint, RoundTripFixedCases) {
    for (const char* s : {"-2^2", "(-2)^2", "-(2)", "y1 - (y2 - x1)", "y1/(y2*x1)", "(y1 + y2)^(-0.5)",
                          "-y1^2", "sqrt(y1^2 + y2^2)", "pow(y1, 1/3)", "2*-y1", "-0", "1e-300*y1",
                          "0.1 + 0.2", "(y1^2)^3", "-(-y1)"}) {
        const Expr e = parse_expression(s, 2);
        const std::string printed = to_string(e);
        EXPECT_TRUE(parse_expression(printed, 2) == e) << s << " -> " << printed;
    }
}

namespace {

Expr random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 12);
    std::uniform_real_distribution<double> val(-3.0, 3.0);
    std::uniform_int_distribution<int> var(0, 1);
    switch (pick(rng)) {
        case 0: return Expr::constant(val(rng));
        case 1: return Expr::x(var(rng));
        case 2: return Expr::y(var(rng));
        case 3: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
        case 4: return random_expr(rng, depth - 1) - random_expr(rng, depth - 1);
        case 5: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
        case 6: return random_expr(rng, depth - 1) / random_expr(rng, depth - 1);
        case 7: return -random_expr(rng, depth - 1);
        case 8: return Expr::pow(random_expr(rng, depth - 1), std::round(val(rng) * 4) / 4);
        case 9: return sqrt(random_expr(rng, depth - 1));
        case 10: return sin(random_expr(rng, depth - 1));
        case 11: return exp(random_expr(rng, depth - 1));
        default: return log(random_expr(rng, depth - 1));
    }
}

}  // namespace

TEST(ExprPrint, RoundTripRandomTrees) {
    std::mt19937_64 rng(2024);
    for (int k = 0; k < 2000; ++k) {
        const Expr e = random_expr(rng, 5);
        const std::string printed = to_string(e);
        const Expr back = parse_expression(printed, 2);
        ASSERT_TRUE(back == e) << printed << " -> " << to_string(back);
    }
}

TEST(MetricParse, Examples) {
    const MetricSpec a = parse_metric("dim 2; L = sqrt(y1^2 + y2^2)");
    EXPECT_EQ(a.dim, 2);
    EXPECT_EQ(a.family, MetricFamily::Custom);

    const MetricSpec b = parse_metric("dim 2; riemannian; a11 = 1; a22 = sin(x1)^2; a12 = 0");
    EXPECT_EQ(b.family, MetricFamily::Riemannian);
    EXPECT_TRUE(b.a_at(1, 0) == b.a_at(0, 1));

    const MetricSpec c = parse_metric("dim 3; randers; a = identity; b1 = 0.5; b2 = 0; b3 = 0");
    EXPECT_EQ(c.family, MetricFamily::Randers);
    EXPECT_EQ(c.dim, 3);
    const MetricSpec c2 = parse_metric(to_text(c));
    EXPECT_TRUE(same_metric(c, c2));
}

TEST(MetricParse, Comments) {
    const MetricSpec m = parse_metric("# header\n\ndim 2   # two\nminkowski\nL = (y1^4 + y2^4)^0.25 # quartic\n");
    EXPECT_EQ(m.family, MetricFamily::Minkowski);
}

TEST(MetricParse, Errors) {
    try {
        parse_metric("dim 2\nL = sqrt(y1^2 + y3^2)\n");
        FAIL();
    } catch (const DimensionMismatch& e) {
        EXPECT_NE(std::string(e.what()).find("2:17"), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_metric("dim 2; riemannian; a11 = y1; a22 = 1"), UnknownSymbol);
    EXPECT_THROW(parse_metric("dim 2; minkowski; L = x1*y1"), UnknownSymbol);
    EXPECT_THROW(parse_metric("dim 2; riemannian; a11 = 1"), InputError);
    EXPECT_THROW(parse_metric("dim 2; riemannian; a11 = 1; a22 = 1; a12 = 1; a21 = 2"), InputError);
    EXPECT_THROW(parse_metric("dim 2; riemannian; a11 = 1; a22 = 1; a13 = 0"), DimensionMismatch);
    EXPECT_THROW(parse_metric("dim 1; L = y1"), DimensionMismatch);
    EXPECT_THROW(parse_metric("L = y1"), SyntaxError);
    EXPECT_THROW(parse_metric("dim 2; L = y1 y2"), SyntaxError);
    EXPECT_THROW(parse_metric("dim 2; finsler;"), SyntaxError);
    EXPECT_THROW(parse_metric("dim 2; randers; a = identity; c1 = 0"), UnknownSymbol);
}

TEST(MetricParse, FixturesRoundTrip) {
    for (const auto& f : builtin_fixtures()) {
        const MetricSpec s = parse_metric(f.text, f.name);
        EXPECT_TRUE(same_metric(s, parse_metric(to_text(s)))) << f.name;
    }
}
