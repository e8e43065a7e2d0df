#include "finsler/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstring>

#include "finsler/errors.hpp"

namespace finsler {

struct Expr::Node {
    Op op = Op::Const;
    double value = 0.0;  // constant value or Pow exponent
    int index = -1;
    Expr a;
    Expr b;
};

namespace {


bool is_binary(Op op) {
    return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div;
}

}  // namespace

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr::Expr() = default;

Expr Expr::constant(double v) {
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = v;
    return Expr(std::move(n));
}

Expr Expr::x(int index) {
    auto n = std::make_shared<Node>();
    n->op = Op::VarX;
    n->index = index;
    return Expr(std::move(n));
}

Expr Expr::y(int index) {
    auto n = std::make_shared<Node>();
    n->op = Op::VarY;
    n->index = index;
    return Expr(std::move(n));
}

Expr Expr::pow(Expr base, double exponent) {
    auto n = std::make_shared<Node>();
    n->op = Op::Pow;
    n->value = exponent;
    n->a = std::move(base);
    return Expr(std::move(n));
}

Expr Expr::unary(Op op, Expr arg) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(arg);
    return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(lhs);
    n->b = std::move(rhs);
    return Expr(std::move(n));
}

Op Expr::op() const noexcept { return node_ ? node_->op : Op::Const; }
double Expr::value() const noexcept { return node_ ? node_->value : 0.0; }
double Expr::exponent() const noexcept { return node_ ? node_->value : 0.0; }
int Expr::index() const noexcept { return node_ ? node_->index : -1; }

const Expr& Expr::lhs() const {
    if (!node_) throw std::logic_error("Expr::lhs on a leaf");
    return node_->a;
}

const Expr& Expr::rhs() const {
    if (!node_) throw std::logic_error("Expr::rhs on a leaf");
    return node_->b;
}

int Expr::max_x_index() const {
    switch (op()) {
        case Op::Const:
        case Op::VarY:
            return -1;
        case Op::VarX:
            return index();
        default:
            break;
    }
    int m = lhs().max_x_index();
    if (is_binary(op())) m = std::max(m, rhs().max_x_index());
    return m;
}

int Expr::max_y_index() const {
    switch (op()) {
        case Op::Const:
        case Op::VarX:
            return -1;
        case Op::VarY:
            return index();
        default:
            break;
    }
    int m = lhs().max_y_index();
    if (is_binary(op())) m = std::max(m, rhs().max_y_index());
    return m;
}

double Expr::evaluate(std::span<const double> x, std::span<const double> y) const {
    switch (op()) {
        case Op::Const:
            return value();
        case Op::VarX:
            if (index() < 0 || static_cast<std::size_t>(index()) >= x.size())
                throw EvaluationError("x index out of range");
            return x[index()];
        case Op::VarY:
            if (index() < 0 || static_cast<std::size_t>(index()) >= y.size())
                throw EvaluationError("y index out of range");
            return y[index()];
        case Op::Add:
            return lhs().evaluate(x, y) + rhs().evaluate(x, y);
        case Op::Sub:
            return lhs().evaluate(x, y) - rhs().evaluate(x, y);
        case Op::Mul:
            return lhs().evaluate(x, y) * rhs().evaluate(x, y);
        case Op::Div: {
            const double d = rhs().evaluate(x, y);
            if (d == 0.0) throw EvaluationError("division by zero");
            return lhs().evaluate(x, y) / d;
        }
        case Op::Neg:
            return -lhs().evaluate(x, y);
        case Op::Pow: {
            const double b = lhs().evaluate(x, y);
            const double p = exponent();
            if (b < 0.0 && p != std::floor(p))
                throw EvaluationError("non-integer power of a negative number");
            if (b == 0.0 && p < 0.0) throw EvaluationError("negative power of zero");
            return std::pow(b, p);
        }
        case Op::Sqrt: {
            const double a = lhs().evaluate(x, y);
            if (a < 0.0) throw EvaluationError("sqrt of a negative number");
            return std::sqrt(a);
        }
        case Op::Sin:
            return std::sin(lhs().evaluate(x, y));
        case Op::Cos:
            return std::cos(lhs().evaluate(x, y));
        case Op::Exp:
            return std::exp(lhs().evaluate(x, y));
        case Op::Log: {
            const double a = lhs().evaluate(x, y);
            if (a <= 0.0) throw EvaluationError("log of a non-positive number");
            return std::log(a);
        }
    }
    throw EvaluationError("unknown expression node");
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.op() != b.op()) return false;
    switch (a.op()) {
        case Op::Const:
            return std::memcmp(&a.node_->value, &b.node_->value, sizeof(double)) == 0 ||
                   a.value() == b.value();
        case Op::VarX:
        case Op::VarY:
            return a.index() == b.index();
        case Op::Pow:
            return a.exponent() == b.exponent() && a.lhs() == b.lhs();
        default:
            break;
    }
    if (is_binary(a.op())) return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    return a.lhs() == b.lhs();
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Op::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(Op::Neg, a); }
Expr sqrt(const Expr& a) { return Expr::unary(Op::Sqrt, a); }
Expr sin(const Expr& a) { return Expr::unary(Op::Sin, a); }
Expr cos(const Expr& a) { return Expr::unary(Op::Cos, a); }
Expr exp(const Expr& a) { return Expr::unary(Op::Exp, a); }
Expr log(const Expr& a) { return Expr::unary(Op::Log, a); }

const char* function_name(Op op) {
    switch (op) {
        case Op::Sqrt: return "sqrt";
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
        case Op::Exp: return "exp";
        case Op::Log: return "log";
        default: return "";
    }
}

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), end);
}

namespace {

// Binding strength used by the printer: sums < products < unary minus < powers < atoms.
int precedence(const Expr& e) {
    switch (e.op()) {
        case Op::Add:
        case Op::Sub:
            return 1;
        case Op::Mul:
        case Op::Div:
            return 2;
        case Op::Neg:
            return 3;
        case Op::Pow:
            return 4;
        case Op::Const:
            return e.value() < 0.0 || std::signbit(e.value()) ? 0 : 5;
        default:
            return 5;
    }
}

void print(const Expr& e, std::string& out);

void print_child(const Expr& e, int min_prec, std::string& out) {
    if (precedence(e) < min_prec) {
        out += '(';
        print(e, out);
        out += ')';
    } else {
        print(e, out);
    }
}

void print(const Expr& e, std::string& out) {
    switch (e.op()) {
        case Op::Const:
            out += format_number(e.value());
            return;
        case Op::VarX:
            out += 'x';
            out += std::to_string(e.index() + 1);
            return;
        case Op::VarY:
            out += 'y';
            out += std::to_string(e.index() + 1);
            return;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div: {
            const int p = precedence(e);
            print_child(e.lhs(), p, out);
            switch (e.op()) {
                case Op::Add: out += " + "; break;
                case Op::Sub: out += " - "; break;
                case Op::Mul: out += "*"; break;
                default: out += "/"; break;
            }
            print_child(e.rhs(), p + 1, out);
            return;
        }
        case Op::Neg:
            out += '-';
            // a bare literal after '-' would be folded into a negative constant
            if (e.lhs().op() == Op::Const) {
                out += '(';
                print(e.lhs(), out);
                out += ')';
            } else {
                print_child(e.lhs(), 3, out);
            }
            return;
        case Op::Pow: {
            print_child(e.lhs(), 5, out);
            out += '^';
            const std::string p = format_number(e.exponent());
            if (e.exponent() < 0.0 || std::signbit(e.exponent()))
                out += "(" + p + ")";
            else
                out += p;
            return;
        }
        default:
            out += function_name(e.op());
            out += '(';
            print(e.lhs(), out);
            out += ')';
            return;
    }
}

}  // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print(e, out);
    return out;
}

}  // namespace finsler
