#include "finsler/jet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

constexpr int kMaxVars = 16;

std::uint64_t pack(const std::vector<int>& e) {
    std::uint64_t key = 0;
    for (std::size_t v = 0; v < e.size(); ++v) key |= static_cast<std::uint64_t>(e[v]) << (4 * v);
    return key;
}

}  // namespace

JetSpace::JetSpace(int dim, int max_x, int max_total)
    : dim_(dim), max_x_(max_x), max_total_(max_total) {
    if (dim < 1 || 2 * dim > kMaxVars) throw OrderOverflow("jet space supports 1..8 dimensions");
    if (max_x < 0 || max_total < max_x || max_total > 15)
        throw OrderOverflow("invalid jet order bound");

    const int nv = 2 * dim;
    std::vector<int> e(static_cast<std::size_t>(nv), 0);
    struct Entry {
        std::uint64_t key;
        int xd, td;
    };
    std::vector<Entry> entries;
    // enumerate exponent vectors variable by variable
    auto rec = [&](auto&& self, int var, int xd, int td) -> void {
        if (var == nv) {
            entries.push_back({pack(e), xd, td});
            return;
        }
        const bool is_x = var < dim;
        for (int k = 0; td + k <= max_total && (!is_x || xd + k <= max_x); ++k) {
            e[static_cast<std::size_t>(var)] = k;
            self(self, var + 1, xd + (is_x ? k : 0), td + k);
        }
        e[static_cast<std::size_t>(var)] = 0;
    };
    rec(rec, 0, 0, 0);
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.td != b.td) return a.td < b.td;
        if (a.xd != b.xd) return a.xd < b.xd;
        return a.key < b.key;
    });

    std::unordered_map<std::uint64_t, std::int32_t> index;
    index.reserve(entries.size() * 2);
    for (const auto& en : entries) {
        index.emplace(en.key, static_cast<std::int32_t>(keys_.size()));
        keys_.push_back(en.key);
        xdeg_.push_back(en.xd);
        tdeg_.push_back(en.td);
    }

    raise_.assign(keys_.size() * static_cast<std::size_t>(nv), -1);
    for (std::size_t m = 0; m < keys_.size(); ++m)
        for (int v = 0; v < nv; ++v) {
            auto it = index.find(keys_[m] + (std::uint64_t{1} << (4 * v)));
            if (it != index.end()) raise_[m * static_cast<std::size_t>(nv) + static_cast<std::size_t>(v)] = it->second;
        }

    buckets_.assign(static_cast<std::size_t>((max_x + 1) * (max_total + 1)), {});
    for (std::size_t p = 0; p < keys_.size(); ++p) {
        for (std::size_t q = 0; q < keys_.size(); ++q) {
            if (tdeg_[p] + tdeg_[q] > max_total) break;  // sorted by total degree
            const int xd = xdeg_[p] + xdeg_[q];
            if (xd > max_x) continue;
            const auto r = index.at(keys_[p] + keys_[q]);
            buckets_[static_cast<std::size_t>(xd * (max_total + 1) + tdeg_[p] + tdeg_[q])].push_back(
                {static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(p),
                 static_cast<std::uint32_t>(q)});
        }
    }
}

std::int64_t JetSpace::find(const std::vector<int>& exponents) const {
    if (static_cast<int>(exponents.size()) != vars()) return -1;
    for (int v : exponents)
        if (v < 0 || v > 15) return -1;
    const std::uint64_t key = pack(exponents);
    // keys are few; a linear scan keeps the class free of hash state
    for (std::size_t m = 0; m < keys_.size(); ++m)
        if (keys_[m] == key) return static_cast<std::int64_t>(m);
    return -1;
}

// ---------------------------------------------------------------------------------------------

Jet::Jet(const JetSpace* space, double value)
    : space_(space),
      constant_(value),
      valid_x_(space ? space->max_x() : 0),
      valid_total_(space ? space->max_total() : 0) {}

Jet Jet::variable(const JetSpace* space, int var, double value) {
    Jet j(space, value);
    j.densify();
    const auto u = space->raise(0, var);
    if (u < 0)
        j.restrict_to(0, space->max_total());  // x seed in a y-only space
    else
        j.coeffs_[static_cast<std::size_t>(u)] = 1.0;
    return j;
}

void Jet::densify() {
    if (!coeffs_.empty()) return;
    coeffs_.assign(space_->size(), 0.0);
    coeffs_[0] = constant_;
}

void Jet::restrict_to(int vx, int vt) {
    valid_x_ = std::min(valid_x_, vx);
    valid_total_ = std::min(valid_total_, vt);
}

double Jet::partial(int var) const {
    if (is_constant()) return 0.0;
    const bool is_x = var < space_->dim();
    if (valid_total_ < 1 || (is_x && valid_x_ < 1)) throw OrderOverflow("derivative exceeds the jet order");
    return coeffs_[static_cast<std::size_t>(space_->raise(0, var))];
}

Jet Jet::derivative(int var) const {
    const bool is_x = var < space_->dim();
    const int vx = is_x ? valid_x_ - 1 : valid_x_;
    const int vt = valid_total_ - 1;
    if (is_constant()) {
        Jet z(space_, 0.0);
        z.restrict_to(std::max(vx, 0), std::max(vt, 0));
        return z;
    }
    if (vx < 0 || vt < 0) throw OrderOverflow("derivative exceeds the jet order");
    Jet out(space_, 0.0);
    out.densify();
    out.valid_x_ = vx;
    out.valid_total_ = vt;
    const std::size_t n = space_->size();
    for (std::size_t m = 0; m < n; ++m) {
        if (space_->total_degree(m) > vt) break;
        if (space_->x_degree(m) > vx) continue;
        const auto up = space_->raise(m, var);
        out.coeffs_[m] = (space_->exponent(m, var) + 1) * coeffs_[static_cast<std::size_t>(up)];
    }
    return out;
}

Jet& Jet::operator+=(const Jet& o) {
    if (!space_) space_ = o.space_;
    if (o.is_constant()) {
        if (is_constant())
            constant_ += o.constant_;
        else
            coeffs_[0] += o.constant_;
        restrict_to(o.valid_x_, o.valid_total_);
        return *this;
    }
    densify();
    for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] += o.coeffs_[m];
    restrict_to(o.valid_x_, o.valid_total_);
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    if (!space_) space_ = o.space_;
    if (o.is_constant()) {
        if (is_constant())
            constant_ -= o.constant_;
        else
            coeffs_[0] -= o.constant_;
        restrict_to(o.valid_x_, o.valid_total_);
        return *this;
    }
    densify();
    for (std::size_t m = 0; m < coeffs_.size(); ++m) coeffs_[m] -= o.coeffs_[m];
    restrict_to(o.valid_x_, o.valid_total_);
    return *this;
}

Jet& Jet::operator*=(double s) {
    if (is_constant())
        constant_ *= s;
    else
        for (double& c : coeffs_) c *= s;
    return *this;
}

Jet Jet::operator-() const {
    Jet r = *this;
    r *= -1.0;
    return r;
}

void Jet::fma(const Jet& a, const Jet& b, double s) {
    if (a.is_constant() || b.is_constant()) {
        Jet t = a * b;
        t *= s;
        *this += t;
        return;
    }
    if (!space_) *this = Jet(a.space_, 0.0);
    densify();
    restrict_to(std::min(a.valid_x_, b.valid_x_), std::min(a.valid_total_, b.valid_total_));
    const double* pa = a.coeffs_.data();
    const double* pb = b.coeffs_.data();
    double* pr = coeffs_.data();
    for (int xd = 0; xd <= valid_x_; ++xd)
        for (int td = xd; td <= valid_total_; ++td)
            for (const auto& t : space_->pairs(xd, td)) pr[t.r] += s * pa[t.p] * pb[t.q];
}

Jet operator*(const Jet& a, const Jet& b) {
    if (a.is_constant()) {
        Jet r = b;
        r *= a.constant_;
        r.restrict_to(a.valid_x_, a.valid_total_);
        return r;
    }
    if (b.is_constant()) {
        Jet r = a;
        r *= b.constant_;
        r.restrict_to(b.valid_x_, b.valid_total_);
        return r;
    }
    Jet r(a.space_, 0.0);
    r.fma(a, b);
    return r;
}

Jet Jet::compose(const std::vector<double>& series) const {
    if (is_constant()) return Jet(space_, series.empty() ? 0.0 : series[0]);
    Jet h = *this;
    h.coeffs_[0] = 0.0;
    const int top = std::min(static_cast<int>(series.size()) - 1, valid_total_);
    Jet r(space_, series[static_cast<std::size_t>(top)]);
    r.densify();
    for (int k = top - 1; k >= 0; --k) {
        r = r * h;
        r += Jet(space_, series[static_cast<std::size_t>(k)]);
    }
    r.restrict_to(valid_x_, valid_total_);
    return r;
}

namespace {

std::vector<double> power_series(double u0, double p, int order) {
    std::vector<double> s(static_cast<std::size_t>(order + 1));
    double binom = 1.0;
    for (int k = 0; k <= order; ++k) {
        s[static_cast<std::size_t>(k)] = binom * std::pow(u0, p - k);
        binom *= (p - k) / (k + 1);
    }
    return s;
}

Jet integer_power(const Jet& a, long p) {
    Jet result(a.space(), 1.0);
    Jet base = a;
    while (p > 0) {
        if (p & 1) result = result * base;
        p >>= 1;
        if (p > 0) base = base * base;
    }
    return result;
}

}  // namespace

Jet reciprocal(const Jet& a) {
    const double u0 = a.value();
    if (u0 == 0.0) throw EvaluationError("division by zero");
    if (a.is_constant()) return Jet(a.space(), 1.0 / u0);
    return a.compose(power_series(u0, -1.0, a.valid_total()));
}

Jet power(const Jet& a, double p) {
    const double u0 = a.value();
    if (p == std::floor(p) && std::abs(p) <= 64) {
        const long ip = static_cast<long>(p);
        if (ip >= 0) return integer_power(a, ip);
        return reciprocal(integer_power(a, -ip));
    }
    if (a.is_constant()) {
        if (u0 < 0.0 || (u0 == 0.0 && p < 0.0))
            throw EvaluationError("power outside its domain");
        return Jet(a.space(), std::pow(u0, p));
    }
    if (u0 <= 0.0) throw EvaluationError("non-integer power of a non-positive number");
    return a.compose(power_series(u0, p, a.valid_total()));
}

Jet sqrt(const Jet& a) { return power(a, 0.5); }

namespace {

Jet eval_node(const Expr& e, const JetSpace& space, const ChartPoint& pt) {
    const int n = space.dim();
    switch (e.op()) {
        case Op::Const:
            return Jet(&space, e.value());
        case Op::VarX:
            return Jet::variable(&space, e.index(), pt.x[static_cast<std::size_t>(e.index())]);
        case Op::VarY:
            return Jet::variable(&space, n + e.index(), pt.y[static_cast<std::size_t>(e.index())]);
        case Op::Add:
            return eval_node(e.lhs(), space, pt) + eval_node(e.rhs(), space, pt);
        case Op::Sub:
            return eval_node(e.lhs(), space, pt) - eval_node(e.rhs(), space, pt);
        case Op::Mul:
            return eval_node(e.lhs(), space, pt) * eval_node(e.rhs(), space, pt);
        case Op::Div: {
            Jet num = eval_node(e.lhs(), space, pt);
            Jet den = eval_node(e.rhs(), space, pt);
            if (den.is_constant()) {
                if (den.value() == 0.0) throw EvaluationError("division by zero");
                return num * (1.0 / den.value());
            }
            return num * reciprocal(den);
        }
        case Op::Neg:
            return -eval_node(e.lhs(), space, pt);
        case Op::Pow:
            return power(eval_node(e.lhs(), space, pt), e.exponent());
        case Op::Sqrt: {
            Jet a = eval_node(e.lhs(), space, pt);
            if (a.value() < 0.0 || (a.value() == 0.0 && !a.is_constant()))
                throw EvaluationError("sqrt outside its domain");
            return sqrt(a);
        }
        case Op::Sin:
        case Op::Cos: {
            Jet a = eval_node(e.lhs(), space, pt);
            const double u0 = a.value();
            std::vector<double> s(static_cast<std::size_t>(a.valid_total() + 1));
            const double shift = e.op() == Op::Cos ? M_PI / 2 : 0.0;
            double fact = 1.0;
            for (std::size_t k = 0; k < s.size(); ++k) {
                if (k > 0) fact *= static_cast<double>(k);
                s[k] = std::sin(u0 + shift + static_cast<double>(k) * M_PI / 2) / fact;
            }
            // exact values at k = 0 keep sin/cos bit-identical to the double evaluator
            s[0] = e.op() == Op::Cos ? std::cos(u0) : std::sin(u0);
            if (s.size() > 1) s[1] = e.op() == Op::Cos ? -std::sin(u0) : std::cos(u0);
            if (s.size() > 2) s[2] = -s[0] / 2;
            if (s.size() > 3) s[3] = -s[1] / 6;
            if (s.size() > 4) s[4] = s[0] / 24;
            if (s.size() > 5) s[5] = s[1] / 120;
            return a.compose(s);
        }
        case Op::Exp: {
            Jet a = eval_node(e.lhs(), space, pt);
            std::vector<double> s(static_cast<std::size_t>(a.valid_total() + 1));
            const double v = std::exp(a.value());
            double fact = 1.0;
            for (std::size_t k = 0; k < s.size(); ++k) {
                if (k > 0) fact *= static_cast<double>(k);
                s[k] = v / fact;
            }
            return a.compose(s);
        }
        case Op::Log: {
            Jet a = eval_node(e.lhs(), space, pt);
            const double u0 = a.value();
            if (u0 <= 0.0) throw EvaluationError("log of a non-positive number");
            std::vector<double> s(static_cast<std::size_t>(a.valid_total() + 1));
            s[0] = std::log(u0);
            for (std::size_t k = 1; k < s.size(); ++k)
                s[k] = ((k % 2) ? 1.0 : -1.0) / (static_cast<double>(k) * std::pow(u0, static_cast<double>(k)));
            return a.compose(s);
        }
    }
    throw EvaluationError("unknown expression node");
}

}  // namespace

Jet evaluate_jet(const Expr& expr, const JetSpace& space, const ChartPoint& point) {
    if (static_cast<int>(point.x.size()) != space.dim() || static_cast<int>(point.y.size()) != space.dim())
        throw EvaluationError("chart point does not match the jet space dimension");
    if (expr.max_x_index() >= space.dim() || expr.max_y_index() >= space.dim())
        throw EvaluationError("expression references a variable beyond the chart dimension");
    Jet j = eval_node(expr, space, point);
    if (!std::isfinite(j.value())) throw EvaluationError("non-finite value");
    return j;
}

// ---------------------------------------------------------------------------------------------

int MultiIndex::x_order() const { return std::accumulate(alpha.begin(), alpha.end(), 0); }
int MultiIndex::order() const {
    return x_order() + std::accumulate(beta.begin(), beta.end(), 0);
}

JetTable::JetTable(ChartPoint point, JetOrder order, std::vector<MultiIndex> indices,
                   std::vector<double> values)
    : point_(std::move(point)), order_(order), indices_(std::move(indices)), values_(std::move(values)) {}

double JetTable::at(const MultiIndex& idx) const {
    if (idx.x_order() > order_.max_x || idx.order() > order_.max_total)
        throw OrderOverflow("multi-index outside the jet table bound");
    for (std::size_t k = 0; k < indices_.size(); ++k)
        if (indices_[k] == idx) return values_[k];
    throw OrderOverflow("multi-index does not match the chart dimension");
}

JetTable jet_eval(const Expr& expr, const ChartPoint& point, JetOrder order) {
    if (order.max_x < 0 || order.max_x > kMaxJetX || order.max_total > kMaxJetTotal ||
        order.max_total < order.max_x)
        throw OrderOverflow("jet order bound exceeds |alpha| <= 2, total <= 5");
    const int n = static_cast<int>(point.x.size());
    const JetSpace space(n, order.max_x, order.max_total);
    const Jet j = evaluate_jet(expr, space, point);
    std::vector<MultiIndex> idx;
    std::vector<double> vals;
    idx.reserve(space.size());
    vals.reserve(space.size());
    for (std::size_t m = 0; m < space.size(); ++m) {
        MultiIndex mi;
        double fact = 1.0;
        for (int v = 0; v < 2 * n; ++v) {
            const int k = space.exponent(m, v);
            for (int f = 2; f <= k; ++f) fact *= f;
            (v < n ? mi.alpha : mi.beta).push_back(k);
        }
        idx.push_back(std::move(mi));
        vals.push_back(j.coeff(m) * fact);
    }
    return JetTable(point, order, std::move(idx), std::move(vals));
}

namespace {

struct Stencil {
    std::vector<double> offsets;  // in units of h
    std::vector<double> weights;  // divided by h^k afterwards
};

const Stencil& stencil(int k) {
    static const Stencil s1{{1, -1}, {0.5, -0.5}};
    static const Stencil s2{{1, 0, -1}, {1, -2, 1}};
    static const Stencil s3{{2, 1, -1, -2}, {0.5, -1, 1, -0.5}};
    static const Stencil s4{{2, 1, 0, -1, -2}, {1, -4, 6, -4, 1}};
    switch (k) {
        case 1: return s1;
        case 2: return s2;
        case 3: return s3;
        case 4: return s4;
        default: throw OrderOverflow("finite differences support at most order 4 per axis");
    }
}

double fd_once(const Expr& expr, const ChartPoint& pt, const std::vector<int>& orders,
               const std::vector<double>& steps) {
    const int nv = static_cast<int>(orders.size());
    const int n = nv / 2;
    std::vector<int> axes;
    for (int v = 0; v < nv; ++v)
        if (orders[static_cast<std::size_t>(v)] > 0) axes.push_back(v);

    std::vector<std::size_t> pos(axes.size(), 0);
    double total = 0.0;
    ChartPoint q = pt;
    while (true) {
        double w = 1.0;
        q = pt;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const int v = axes[a];
            const Stencil& s = stencil(orders[static_cast<std::size_t>(v)]);
            const double h = steps[static_cast<std::size_t>(v)];
            w *= s.weights[pos[a]];
            double& coord = v < n ? q.x[static_cast<std::size_t>(v)] : q.y[static_cast<std::size_t>(v - n)];
            coord += s.offsets[pos[a]] * h;
        }
        total += w * expr.evaluate(q.x, q.y);
        std::size_t a = 0;
        for (; a < axes.size(); ++a) {
            const Stencil& s = stencil(orders[static_cast<std::size_t>(axes[a])]);
            if (++pos[a] < s.offsets.size()) break;
            pos[a] = 0;
        }
        if (a == axes.size()) break;
    }
    for (int v : axes)
        total /= std::pow(steps[static_cast<std::size_t>(v)], orders[static_cast<std::size_t>(v)]);
    return total;
}

}  // namespace

double fd_derivative(const Expr& expr, const ChartPoint& point, const MultiIndex& idx) {
    const int n = static_cast<int>(point.x.size());
    if (static_cast<int>(idx.alpha.size()) != n || static_cast<int>(idx.beta.size()) != n)
        throw OrderOverflow("multi-index does not match the chart dimension");
    if (idx.order() > 4) throw OrderOverflow("finite differences support total order <= 4");
    std::vector<int> orders(idx.alpha);
    orders.insert(orders.end(), idx.beta.begin(), idx.beta.end());
    if (idx.order() == 0) return expr.evaluate(point.x, point.y);

    std::vector<double> h(orders.size());
    for (int v = 0; v < 2 * n; ++v) {
        const double c = v < n ? point.x[static_cast<std::size_t>(v)] : point.y[static_cast<std::size_t>(v - n)];
        h[static_cast<std::size_t>(v)] = 1e-2 * std::max(1.0, std::abs(c));
    }
    std::vector<double> half(h);
    for (double& s : half) s *= 0.5;
    const double coarse = fd_once(expr, point, orders, h);
    const double fine = fd_once(expr, point, orders, half);
    return (4.0 * fine - coarse) / 3.0;
}

}  // namespace finsler
