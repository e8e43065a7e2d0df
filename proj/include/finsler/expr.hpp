#pragma once

#include <memory>
#include <span>
#include <string>

namespace finsler {

/// Node kinds of the metric expression language.
enum class Op {
    Const,
    VarX,
    VarY,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Pow,  // base ^ constant exponent
    Sqrt,
    Sin,
    Cos,
    Exp,
    Log,
};

/// Immutable expression tree over chart coordinates x1..xn and fibre coordinates y1..yn.
///
/// Variable indices are stored zero-based. Subtrees are shared, so copies are cheap and
/// an Expr may be handed between threads freely.
class Expr {
public:
    Expr();  // the constant 0

    static Expr constant(double v);
    static Expr x(int index);
    static Expr y(int index);
    static Expr pow(Expr base, double exponent);
    static Expr unary(Op op, Expr arg);
    static Expr binary(Op op, Expr lhs, Expr rhs);

    Op op() const noexcept;
    double value() const noexcept;     // Const value
    double exponent() const noexcept;  // Pow exponent
    int index() const noexcept;        // VarX / VarY index (zero-based)
    const Expr& lhs() const;           // first operand
    const Expr& rhs() const;           // second operand of a binary node

    bool is_constant() const noexcept { return op() == Op::Const; }

    /// Largest x / y index referenced, or -1 when the variable family is absent.
    int max_x_index() const;
    int max_y_index() const;

    /// Plain double evaluation; throws EvaluationError on domain violations.
    double evaluate(std::span<const double> x, std::span<const double> y) const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

Expr sqrt(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);

/// Canonical text form. Re-parsing the output reproduces the same tree.
std::string to_string(const Expr& e);

/// Shortest decimal form of v that round-trips through strtod.
std::string format_number(double v);

const char* function_name(Op op);

}  // namespace finsler
