#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "finsler/expr.hpp"
#include "finsler/metric.hpp"

namespace finsler {

/// Monomial layout for truncated Taylor polynomials in 2n variables
/// (x1..xn followed by y1..yn).
///
/// A monomial is kept when its x-degree is at most max_x and its total degree at most
/// max_total. Exponents are packed four bits per variable.
class JetSpace {
public:
    JetSpace(int dim, int max_x, int max_total);

    int dim() const noexcept { return dim_; }
    int vars() const noexcept { return 2 * dim_; }
    int max_x() const noexcept { return max_x_; }
    int max_total() const noexcept { return max_total_; }
    std::size_t size() const noexcept { return keys_.size(); }

    int exponent(std::size_t m, int var) const noexcept {
        return static_cast<int>((keys_[m] >> (4 * var)) & 0xF);
    }
    int x_degree(std::size_t m) const noexcept { return xdeg_[m]; }
    int total_degree(std::size_t m) const noexcept { return tdeg_[m]; }

    /// Index of the monomial with the given exponents, or -1.
    std::int64_t find(const std::vector<int>& exponents) const;
    /// Index of m + e_var, or -1 when that falls outside the space.
    std::int32_t raise(std::size_t m, int var) const noexcept {
        return raise_[m * static_cast<std::size_t>(vars()) + static_cast<std::size_t>(var)];
    }

    struct Triple {
        std::uint32_t r, p, q;
    };
    /// Product pairs whose result has x-degree xd and total degree td.
    const std::vector<Triple>& pairs(int xd, int td) const {
        return buckets_[static_cast<std::size_t>(xd * (max_total_ + 1) + td)];
    }

private:
    int dim_;
    int max_x_;
    int max_total_;
    std::vector<std::uint64_t> keys_;
    std::vector<int> xdeg_;
    std::vector<int> tdeg_;
    std::vector<std::int32_t> raise_;
    std::vector<std::vector<Triple>> buckets_;
};

/// A truncated Taylor polynomial. Coefficients are normalised (f^(k) / k!).
///
/// Entries are trustworthy for monomials with x-degree <= valid_x and total degree <=
/// valid_total; differentiation shrinks that region.
class Jet {
public:
    Jet() = default;
    Jet(const JetSpace* space, double value);

    static Jet variable(const JetSpace* space, int var, double value);

    const JetSpace* space() const noexcept { return space_; }
    double value() const noexcept { return coeffs_.empty() ? constant_ : coeffs_[0]; }
    bool is_constant() const noexcept { return coeffs_.empty(); }
    int valid_x() const noexcept { return valid_x_; }
    int valid_total() const noexcept { return valid_total_; }

    double coeff(std::size_t m) const noexcept {
        return coeffs_.empty() ? (m == 0 ? constant_ : 0.0) : coeffs_[m];
    }

    /// Value of the first partial in variable var, without building a new jet.
    double partial(int var) const;

    /// Partial derivative with respect to x_i (var = i) or y_i (var = n + i).
    Jet derivative(int var) const;
    Jet dx(int i) const { return derivative(i); }
    Jet dy(int i) const { return derivative(space_->dim() + i); }

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(double s);
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator*(const Jet& a, const Jet& b);
    Jet operator-() const;

    /// Adds s * a * b into this jet without a temporary.
    void fma(const Jet& a, const Jet& b, double s = 1.0);

    /// f(u) from the normalised Taylor coefficients of f at u's value.
    Jet compose(const std::vector<double>& series) const;

    /// Drops to the lower of both validity regions.
    void restrict_to(int vx, int vt);

private:
    void densify();

    const JetSpace* space_ = nullptr;
    double constant_ = 0.0;
    std::vector<double> coeffs_;
    int valid_x_ = 0;
    int valid_total_ = 0;
};

Jet reciprocal(const Jet& a);
Jet power(const Jet& a, double p);
Jet sqrt(const Jet& a);

/// Evaluates expr as a jet seeded at point.
Jet evaluate_jet(const Expr& expr, const JetSpace& space, const ChartPoint& point);

/// Derivative orders: alpha on x, beta on y.
struct MultiIndex {
    std::vector<int> alpha;
    std::vector<int> beta;

    int x_order() const;
    int order() const;
    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

struct JetOrder {
    int max_x = 2;
    int max_total = 4;
};

/// Every mixed partial of an expression at a point within an order bound.
class JetTable {
public:
    JetTable(ChartPoint point, JetOrder order, std::vector<MultiIndex> indices,
             std::vector<double> values);

    const ChartPoint& point() const noexcept { return point_; }
    JetOrder order() const noexcept { return order_; }
    const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Throws OrderOverflow when idx lies outside the stored bound.
    double at(const MultiIndex& idx) const;

private:
    ChartPoint point_;
    JetOrder order_;
    std::vector<MultiIndex> indices_;
    std::vector<double> values_;
};

/// Upper limits accepted by jet_eval.
inline constexpr int kMaxJetX = 2;
inline constexpr int kMaxJetTotal = 5;

JetTable jet_eval(const Expr& expr, const ChartPoint& point, JetOrder order);

/// Central differences with one Richardson step; an oracle independent of the jets.
double fd_derivative(const Expr& expr, const ChartPoint& point, const MultiIndex& idx);

}  // namespace finsler
