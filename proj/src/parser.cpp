#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>

#include "finsler/errors.hpp"
#include "finsler/metric.hpp"

namespace finsler {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, Equals, Sep, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0.0;
    std::size_t line = 1;
    std::size_t column = 1;
};

std::string describe(const Token& t) {
    switch (t.kind) {
        case Tok::End: return "end of input";
        case Tok::Sep: return t.text == ";" ? "';'" : "end of line";
        default: return "'" + t.text + "'";
    }
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_blank();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            const char c = src_[pos_];
            if (c == '\n' || c == ';') {
                t.kind = Tok::Sep;
                t.text = std::string(1, c);
                advance();
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                lex_number(t);
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = Tok::Ident;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                    t.text += src_[pos_];
                    advance();
                }
            } else {
                switch (c) {
                    case '+': t.kind = Tok::Plus; break;
                    case '-': t.kind = Tok::Minus; break;
                    case '*': t.kind = Tok::Star; break;
                    case '/': t.kind = Tok::Slash; break;
                    case '^': t.kind = Tok::Caret; break;
                    case '(': t.kind = Tok::LParen; break;
                    case ')': t.kind = Tok::RParen; break;
                    case ',': t.kind = Tok::Comma; break;
                    case '=': t.kind = Tok::Equals; break;
                    default:
                        throw SyntaxError(line_, col_, "'" + std::string(1, c) + "'",
                                          {"an expression or statement"});
                }
                t.text = std::string(1, c);
                advance();
            }
            out.push_back(std::move(t));
        }
    }

private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_blank() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r') {
                advance();
            } else {
                return;
            }
        }
    }

    void lex_number(Token& t) {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            advance();
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                while (pos_ < look) advance();
                digits();
            }
        }
        t.kind = Tok::Number;
        t.text = std::string(src_.substr(start, pos_ - start));
        if (t.text == ".") throw SyntaxError(t.line, t.column, "'.'", {"a number"});
        char* end = nullptr;
        t.number = std::strtod(t.text.c_str(), &end);
        if (!std::isfinite(t.number))
            throw SyntaxError(t.line, t.column, "'" + t.text + "'", {"a finite number"});
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

// Which variable families an expression may mention.
struct VarPolicy {
    bool allow_x = true;
    bool allow_y = true;
};

class Parser {
public:
    Parser(std::vector<Token> toks, int dim) : toks_(std::move(toks)), dim_(dim) {}

    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const Token& t, std::vector<std::string> expected) const {
        throw SyntaxError(t.line, t.column, describe(t), std::move(expected));
    }

    const Token& expect(Tok kind, const char* what) {
        if (peek().kind != kind) fail(peek(), {what});
        return next();
    }

    void skip_seps() {
        while (peek().kind == Tok::Sep) next();
    }

    // Statement terminator: at least one separator, or end of input.
    void end_statement() {
        if (peek().kind == Tok::End) return;
        if (peek().kind != Tok::Sep) fail(peek(), {"';'", "end of line"});
        skip_seps();
    }

    void set_dim(int d) { dim_ = d; }
    void set_policy(VarPolicy p, const char* context) {
        policy_ = p;
        context_ = context;
    }

    Expr expression() {
        Expr lhs = term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const Op op = next().kind == Tok::Plus ? Op::Add : Op::Sub;
            lhs = Expr::binary(op, lhs, term());
        }
        return lhs;
    }

private:
    Expr term() {
        Expr lhs = unary();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            const Op op = next().kind == Tok::Star ? Op::Mul : Op::Div;
            lhs = Expr::binary(op, lhs, unary());
        }
        return lhs;
    }

    Expr unary() {
        if (peek().kind == Tok::Minus) {
            next();
            // "-2" is a literal unless it is the base of a power
            if (peek().kind == Tok::Number && toks_[pos_ + 1].kind != Tok::Caret) {
                return Expr::constant(-next().number);
            }
            return -unary();
        }
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (peek().kind == Tok::Caret) {
            next();
            const Token& at = peek();
            const Expr e = unary();
            return Expr::pow(base, constant_value(e, at));
        }
        return base;
    }

    double constant_value(const Expr& e, const Token& at) const {
        if (e.max_x_index() >= 0 || e.max_y_index() >= 0)
            throw SyntaxError(at.line, at.column, describe(at), {"a constant exponent"});
        try {
            return e.evaluate({}, {});
        } catch (const EvaluationError&) {
            throw SyntaxError(at.line, at.column, describe(at), {"a finite constant exponent"});
        }
    }

    Expr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Number:
                next();
                return Expr::constant(t.number);
            case Tok::LParen: {
                next();
                Expr e = expression();
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::Ident:
                return identifier();
            default:
                fail(t, {"a number", "a variable", "a function", "'('"});
        }
    }

    Expr identifier() {
        const Token& t = next();
        const std::string& s = t.text;
        if ((s[0] == 'x' || s[0] == 'y') && s.size() > 1 &&
            s.find_first_not_of("0123456789", 1) == std::string::npos) {
            const bool is_x = s[0] == 'x';
            if (s.size() > 3) throw DimensionMismatch(t.line, t.column, s + " exceeds dim " + std::to_string(dim_));
            const int idx = std::stoi(s.substr(1));
            if (idx < 1 || idx > dim_)
                throw DimensionMismatch(t.line, t.column,
                                        s + " is outside 1.." + std::to_string(dim_));
            if ((is_x && !policy_.allow_x) || (!is_x && !policy_.allow_y))
                throw UnknownSymbol(t.line, t.column, s + " (not allowed in " + context_ + ")");
            return is_x ? Expr::x(idx - 1) : Expr::y(idx - 1);
        }
        static const std::map<std::string, Op> functions = {
            {"sqrt", Op::Sqrt}, {"sin", Op::Sin}, {"cos", Op::Cos}, {"exp", Op::Exp}, {"log", Op::Log}};
        if (s == "pow") {
            expect(Tok::LParen, "'('");
            Expr base = expression();
            expect(Tok::Comma, "','");
            const Token& at = peek();
            const Expr e = expression();
            expect(Tok::RParen, "')'");
            return Expr::pow(base, constant_value(e, at));
        }
        auto it = functions.find(s);
        if (it == functions.end()) throw UnknownSymbol(t.line, t.column, s);
        expect(Tok::LParen, "'('");
        Expr arg = expression();
        expect(Tok::RParen, "')'");
        return Expr::unary(it->second, arg);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int dim_;
    VarPolicy policy_;
    std::string context_ = "expression";
};

constexpr int kMaxDim = 8;

struct Assignment {
    Token target;
    Expr value;
};

// Parses "aij" / "bi" component names; returns false when the name is not of that shape.
bool component_index(const std::string& name, char head, std::size_t digits, int dim,
                     std::vector<int>& out) {
    if (name.size() != digits + 1 || name[0] != head) return false;
    out.clear();
    for (std::size_t k = 1; k < name.size(); ++k) {
        if (!std::isdigit(static_cast<unsigned char>(name[k]))) return false;
        out.push_back(name[k] - '1');
    }
    (void)dim;
    return true;
}

}  // namespace

const char* family_name(MetricFamily f) {
    switch (f) {
        case MetricFamily::Riemannian: return "riemannian";
        case MetricFamily::Randers: return "randers";
        case MetricFamily::Minkowski: return "minkowski";
        case MetricFamily::Custom: return "custom";
    }
    return "custom";
}

Expr parse_expression(std::string_view text, int dim) {
    Parser p(Lexer(text).run(), dim);
    Expr e = p.expression();
    if (p.peek().kind != Tok::End) p.fail(p.peek(), {"an operator", "end of input"});
    return e;
}

MetricSpec parse_metric(std::string_view text, std::string name) {
    Parser p(Lexer(text).run(), 0);
    MetricSpec spec;
    spec.name = std::move(name);

    p.skip_seps();
    const Token& kw = p.peek();
    if (kw.kind != Tok::Ident || kw.text != "dim") p.fail(kw, {"'dim'"});
    p.next();
    const Token& nt = p.peek();
    if (nt.kind != Tok::Number || nt.number != std::floor(nt.number)) p.fail(nt, {"an integer dimension"});
    p.next();
    if (nt.number < 2 || nt.number > kMaxDim)
        throw DimensionMismatch(nt.line, nt.column,
                                "dimension must lie in 2.." + std::to_string(kMaxDim));
    spec.dim = static_cast<int>(nt.number);
    const int n = spec.dim;
    p.set_dim(n);
    p.end_statement();

    const Token& head = p.peek();
    if (head.kind != Tok::Ident) p.fail(head, {"'L'", "'riemannian'", "'randers'", "'minkowski'"});

    auto parse_length = [&](VarPolicy policy, const char* ctx) {
        const Token& lt = p.peek();
        if (lt.kind != Tok::Ident || lt.text != "L") p.fail(lt, {"'L'"});
        p.next();
        p.expect(Tok::Equals, "'='");
        p.set_policy(policy, ctx);
        spec.length = p.expression();
        p.end_statement();
        if (p.peek().kind != Tok::End) p.fail(p.peek(), {"end of input"});
    };

    if (head.text == "L") {
        spec.family = MetricFamily::Custom;
        parse_length({true, true}, "L");
        return spec;
    }
    if (head.text == "minkowski") {
        p.next();
        p.end_statement();
        spec.family = MetricFamily::Minkowski;
        parse_length({false, true}, "a minkowski norm");
        return spec;
    }
    if (head.text != "riemannian" && head.text != "randers")
        p.fail(head, {"'L'", "'riemannian'", "'randers'", "'minkowski'"});

    spec.family = head.text == "riemannian" ? MetricFamily::Riemannian : MetricFamily::Randers;
    const bool randers = spec.family == MetricFamily::Randers;
    p.next();
    p.end_statement();

    std::vector<std::optional<Expr>> a(static_cast<std::size_t>(n * n));
    std::vector<std::optional<Expr>> b(static_cast<std::size_t>(n));
    std::vector<bool> explicit_entry(a.size(), false);
    std::vector<int> idx;
    p.set_policy({true, false}, "metric coefficients");

    while (p.peek().kind != Tok::End) {
        const Token target = p.peek();
        if (target.kind != Tok::Ident) p.fail(target, {"a component name"});
        p.next();
        p.expect(Tok::Equals, "'='");
        if (target.text == "a") {
            const Token& v = p.peek();
            if (v.kind != Tok::Ident || v.text != "identity") p.fail(v, {"'identity'"});
            p.next();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    a[static_cast<std::size_t>(i * n + j)] = Expr::constant(i == j ? 1.0 : 0.0);
        } else if (component_index(target.text, 'a', 2, n, idx)) {
            for (int k : idx)
                if (k < 0 || k >= n)
                    throw DimensionMismatch(target.line, target.column,
                                            target.text + " is outside 1.." + std::to_string(n));
            Expr e = p.expression();
            const auto ij = static_cast<std::size_t>(idx[0] * n + idx[1]);
            const auto ji = static_cast<std::size_t>(idx[1] * n + idx[0]);
            if (idx[0] != idx[1] && explicit_entry[ji] && !(*a[ji] == e) &&
                !(a[ji]->is_constant() && e.is_constant() && a[ji]->value() == e.value()))
                throw InputError("asymmetric metric at " + std::to_string(target.line) + ":" +
                                 std::to_string(target.column) + ": " + target.text +
                                 " differs from its transpose");
            a[ij] = e;
            a[ji] = e;
            explicit_entry[ij] = true;
        } else if (randers && component_index(target.text, 'b', 1, n, idx)) {
            if (idx[0] < 0 || idx[0] >= n)
                throw DimensionMismatch(target.line, target.column,
                                        target.text + " is outside 1.." + std::to_string(n));
            b[static_cast<std::size_t>(idx[0])] = p.expression();
        } else {
            throw UnknownSymbol(target.line, target.column, target.text);
        }
        p.end_statement();
    }

    spec.a.resize(a.size());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto k = static_cast<std::size_t>(i * n + j);
            if (a[k]) {
                spec.a[k] = *a[k];
            } else if (i == j) {
                throw InputError("missing diagonal coefficient a" + std::to_string(i + 1) +
                                 std::to_string(i + 1));
            } else {
                spec.a[k] = Expr::constant(0.0);
            }
        }
    }
    if (randers) {
        spec.b.resize(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) spec.b[i] = b[i] ? *b[i] : Expr::constant(0.0);
    }
    return spec;
}

std::string to_text(const MetricSpec& spec) {
    std::string out = "dim " + std::to_string(spec.dim) + ";\n";
    const int n = spec.dim;
    switch (spec.family) {
        case MetricFamily::Custom:
            out += "L = " + to_string(spec.length) + "\n";
            return out;
        case MetricFamily::Minkowski:
            out += "minkowski;\nL = " + to_string(spec.length) + "\n";
            return out;
        default:
            break;
    }
    out += std::string(family_name(spec.family)) + ";\n";
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            out += "a" + std::to_string(i + 1) + std::to_string(j + 1) + " = " +
                   to_string(spec.a_at(i, j)) + "\n";
    for (int i = 0; i < static_cast<int>(spec.b.size()); ++i)
        out += "b" + std::to_string(i + 1) + " = " + to_string(spec.b[static_cast<std::size_t>(i)]) + "\n";
    return out;
}

bool same_metric(const MetricSpec& x, const MetricSpec& y) {
    if (x.dim != y.dim || x.family != y.family || x.a.size() != y.a.size() ||
        x.b.size() != y.b.size())
        return false;
    for (std::size_t i = 0; i < x.a.size(); ++i)
        if (!(x.a[i] == y.a[i])) return false;
    for (std::size_t i = 0; i < x.b.size(); ++i)
        if (!(x.b[i] == y.b[i])) return false;
    if (x.family == MetricFamily::Custom || x.family == MetricFamily::Minkowski)
        return x.length == y.length;
    return true;
}

}  // namespace finsler
