#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "finsler/expr.hpp"

namespace finsler {

enum class MetricFamily { Riemannian, Randers, Minkowski, Custom };

const char* family_name(MetricFamily f);

/// A Finsler metric on an n-dimensional chart.
///
/// Riemannian and Randers carry the coefficient matrix a (row-major, n*n, x only);
/// Randers also carries the 1-form b. Minkowski and Custom carry the length L directly.
struct MetricSpec {
    int dim = 0;
    MetricFamily family = MetricFamily::Custom;
    std::string name;
    std::vector<Expr> a;
    std::vector<Expr> b;
    Expr length;

    const Expr& a_at(int i, int j) const { return a[static_cast<std::size_t>(i * dim + j)]; }

    /// L(x, y) as one expression.
    Expr length_expr() const;
    /// E = L^2 / 2, written so that its jets stay exact for the quadratic families.
    Expr energy_expr() const;
};

/// Parses the metric text format. Throws SyntaxError, UnknownSymbol or DimensionMismatch.
MetricSpec parse_metric(std::string_view text, std::string name = "custom");

/// Parses a single expression over x1..xn, y1..yn.
Expr parse_expression(std::string_view text, int dim);

/// Canonical metric text; parse_metric(to_text(s)) reproduces s.
std::string to_text(const MetricSpec& spec);

bool same_metric(const MetricSpec& a, const MetricSpec& b);

struct ChartPoint {
    std::vector<double> x;
    std::vector<double> y;
};

struct Interval {
    double lo = -1.0;
    double hi = 1.0;
};

struct ChartDomain {
    int dim = 0;
    std::vector<Interval> x_box;
    std::vector<Interval> y_box;
    double eps_y = 0.1;
    std::uint64_t seed = 42;
};

/// Default box for a metric: x in [-1,1]^n, y in [-1,1]^n.
ChartDomain default_domain(int dim, std::uint64_t seed = 42);

struct HomogeneityReport {
    double max_relative_error = 0.0;
    bool passed = true;
    std::vector<double> errors;  // one per (point, lambda), point-major
};

HomogeneityReport validate_homogeneity(const MetricSpec& spec,
                                       const std::vector<ChartPoint>& points,
                                       const std::vector<double>& lambdas);

/// Deterministic draws from the domain, rejecting short y, non-positive or non-finite L,
/// Randers points violating a^{ij} b_i b_j < 1, and points below the det(g) floor.
std::vector<ChartPoint> sample_points(const MetricSpec& spec, const ChartDomain& domain,
                                      int count);

/// Pure box sampling without any metric-based rejection.
std::vector<ChartPoint> sample_points(const ChartDomain& domain, int count);

/// Built-in fixtures.
struct Fixture {
    std::string name;
    std::string text;
    ChartDomain domain;
};

const std::vector<Fixture>& builtin_fixtures();

/// Looks up a fixture by name; honours FINSLER_FIXTURES for an alternate directory.
/// Also accepts a path to a metric file. Throws InputError when nothing matches.
std::pair<MetricSpec, ChartDomain> load_metric(const std::string& name_or_path);

}  // namespace finsler
