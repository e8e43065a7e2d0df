#include "finsler/metric.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "finsler/errors.hpp"
#include "finsler/jet.hpp"

namespace finsler {

namespace {

bool is_zero_const(const Expr& e) { return e.is_constant() && e.value() == 0.0; }

// sum_{ij} a_ij y_i y_j written without the zero terms
Expr quadratic_form(const MetricSpec& s) {
    Expr sum;
    bool first = true;
    auto add = [&](Expr t) {
        sum = first ? t : sum + t;
        first = false;
    };
    for (int i = 0; i < s.dim; ++i) {
        const Expr& aii = s.a_at(i, i);
        if (!is_zero_const(aii)) add(aii * (Expr::y(i) * Expr::y(i)));
        for (int j = i + 1; j < s.dim; ++j) {
            const Expr& aij = s.a_at(i, j);
            if (!is_zero_const(aij)) add(Expr::constant(2.0) * aij * (Expr::y(i) * Expr::y(j)));
        }
    }
    return first ? Expr::constant(0.0) : sum;
}

Expr one_form(const MetricSpec& s) {
    Expr sum;
    bool first = true;
    for (int i = 0; i < s.dim; ++i) {
        const Expr& bi = s.b[static_cast<std::size_t>(i)];
        if (is_zero_const(bi)) continue;
        Expr t = bi * Expr::y(i);
        sum = first ? t : sum + t;
        first = false;
    }
    return first ? Expr::constant(0.0) : sum;
}

}  // namespace

Expr MetricSpec::length_expr() const {
    switch (family) {
        case MetricFamily::Riemannian:
            return sqrt(quadratic_form(*this));
        case MetricFamily::Randers:
            return sqrt(quadratic_form(*this)) + one_form(*this);
        default:
            return length;
    }
}

Expr MetricSpec::energy_expr() const {
    const Expr half = Expr::constant(0.5);
    switch (family) {
        case MetricFamily::Riemannian:
            return half * quadratic_form(*this);
        case MetricFamily::Randers: {
            const Expr q = quadratic_form(*this);
            const Expr beta = one_form(*this);
            return half * q + beta * sqrt(q) + half * (beta * beta);
        }
        default:
            break;
    }
    // keep E polynomial when L is a root
    if (length.op() == Op::Sqrt) return half * length.lhs();
    if (length.op() == Op::Pow) return half * Expr::pow(length.lhs(), 2.0 * length.exponent());
    return half * Expr::pow(length, 2.0);
}

ChartDomain default_domain(int dim, std::uint64_t seed) {
    ChartDomain d;
    d.dim = dim;
    d.x_box.assign(static_cast<std::size_t>(dim), Interval{-1.0, 1.0});
    d.y_box.assign(static_cast<std::size_t>(dim), Interval{-1.0, 1.0});
    d.eps_y = 0.1;
    d.seed = seed;
    return d;
}

HomogeneityReport validate_homogeneity(const MetricSpec& spec, const std::vector<ChartPoint>& points,
                                       const std::vector<double>& lambdas) {
    const Expr L = spec.length_expr();
    HomogeneityReport rep;
    for (const auto& p : points) {
        const double base = L.evaluate(p.x, p.y);
        for (double lam : lambdas) {
            if (!(lam > 0.0)) throw InputError("homogeneity factors must be positive");
            std::vector<double> ys(p.y);
            for (double& v : ys) v *= lam;
            const double scaled = L.evaluate(p.x, ys);
            const double denom = std::abs(lam * base);
            const double err = std::abs(scaled - lam * base) / (denom > 0.0 ? denom : 1.0);
            rep.errors.push_back(err);
            rep.max_relative_error = std::max(rep.max_relative_error, err);
        }
    }
    rep.passed = rep.max_relative_error < 1e-10;
    return rep;
}

namespace {

void check_domain(const ChartDomain& d) {
    if (d.dim < 2) throw InputError("domain dimension must be at least 2");
    if (static_cast<int>(d.x_box.size()) != d.dim || static_cast<int>(d.y_box.size()) != d.dim)
        throw InputError("domain boxes do not match the dimension");
    if (!(d.eps_y > 0.0)) throw InputError("eps_y must be positive");
    for (const auto& iv : d.x_box)
        if (!(iv.lo <= iv.hi)) throw InputError("empty x interval");
    for (const auto& iv : d.y_box)
        if (!(iv.lo <= iv.hi)) throw InputError("empty y interval");
}

double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

ChartPoint draw(const ChartDomain& d, std::mt19937_64& rng) {
    ChartPoint p;
    p.x.resize(static_cast<std::size_t>(d.dim));
    p.y.resize(static_cast<std::size_t>(d.dim));
    for (std::size_t i = 0; i < p.x.size(); ++i)
        p.x[i] = d.x_box[i].lo + (d.x_box[i].hi - d.x_box[i].lo) * unit_draw(rng);
    for (std::size_t i = 0; i < p.y.size(); ++i)
        p.y[i] = d.y_box[i].lo + (d.y_box[i].hi - d.y_box[i].lo) * unit_draw(rng);
    return p;
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

// Metric-dependent admissibility of a drawn point.
bool admissible(const MetricSpec& spec, const Expr& L, const Expr& E, const ChartPoint& p) {
    const int n = spec.dim;
    try {
        const double len = L.evaluate(p.x, p.y);
        if (!std::isfinite(len) || len <= 0.0) return false;
        if (spec.family == MetricFamily::Randers) {
            Eigen::MatrixXd a(n, n);
            Eigen::VectorXd b(n);
            for (int i = 0; i < n; ++i) {
                b(i) = spec.b[static_cast<std::size_t>(i)].evaluate(p.x, p.y);
                for (int j = 0; j < n; ++j) a(i, j) = spec.a_at(i, j).evaluate(p.x, p.y);
            }
            Eigen::LLT<Eigen::MatrixXd> llt(a);
            if (llt.info() != Eigen::Success) return false;
            if (b.dot(llt.solve(b)) >= 1.0) return false;
        }
        const JetSpace space(n, 0, 2);
        const Jet e = evaluate_jet(E, space, p);
        Eigen::MatrixXd g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = e.dy(i).dy(j).value();
        if (!g.allFinite()) return false;
        const double scale = g.cwiseAbs().maxCoeff();
        return std::abs(g.determinant()) >= 1e-10 * std::pow(scale, n) && scale > 0.0;
    } catch (const EvaluationError&) {
        return false;
    }
}

constexpr int kExhaustionDraws = 10000;

template <class Accept>
std::vector<ChartPoint> sample_with(const ChartDomain& domain, int count, Accept accept) {
    check_domain(domain);
    if (count < 1) throw InputError("sample count must be at least 1");
    std::mt19937_64 rng(domain.seed);
    std::vector<ChartPoint> out;
    long draws = 0;
    long rejected = 0;
    while (static_cast<int>(out.size()) < count) {
        ChartPoint p = draw(domain, rng);
        ++draws;
        if (norm(p.y) >= domain.eps_y && accept(p))
            out.push_back(std::move(p));
        else
            ++rejected;
        if (draws >= kExhaustionDraws && rejected > 0.99 * static_cast<double>(draws))
            throw DomainExhausted("more than 99% of " + std::to_string(draws) +
                                  " draws rejected; metric degenerate on this domain");
    }
    return out;
}

}  // namespace

std::vector<ChartPoint> sample_points(const ChartDomain& domain, int count) {
    return sample_with(domain, count, [](const ChartPoint&) { return true; });
}

std::vector<ChartPoint> sample_points(const MetricSpec& spec, const ChartDomain& domain, int count) {
    if (domain.dim != spec.dim) throw InputError("domain dimension differs from the metric");
    const Expr L = spec.length_expr();
    const Expr E = spec.energy_expr();
    return sample_with(domain, count, [&](const ChartPoint& p) { return admissible(spec, L, E, p); });
}

// ---------------------------------------------------------------------------------------------

namespace {

ChartDomain box(int dim, std::vector<Interval> x, Interval y = {-1.0, 1.0}) {
    ChartDomain d = default_domain(dim);
    d.x_box = std::move(x);
    d.y_box.assign(static_cast<std::size_t>(dim), y);
    return d;
}

std::vector<Fixture> make_fixtures() {
    std::vector<Fixture> f;
    f.push_back({"euclidean-n2", "dim 2;\nL = sqrt(y1^2 + y2^2)\n", default_domain(2)});
    f.push_back({"sphere-n2",
                 "dim 2;\nriemannian;\na11 = 1\na12 = 0\na22 = sin(x1)^2\n",
                 box(2, {{0.3, 2.8}, {-1.0, 1.0}})});
    f.push_back({"hyperbolic-n2",
                 "dim 2;\nriemannian;\na11 = 1/x2^2\na12 = 0\na22 = 1/x2^2\n",
                 box(2, {{-1.0, 1.0}, {0.5, 2.0}})});
    f.push_back({"randers-n3", "dim 3;\nranders;\na = identity\nb1 = 0.5\nb2 = 0\nb3 = 0\n",
                 default_domain(3)});
    f.push_back({"quartic-minkowski-n3", "dim 3;\nminkowski;\nL = (y1^4 + y2^4 + y3^4)^0.25\n",
                 box(3, {{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}, {0.2, 1.2})});
    f.push_back({"randers-curved-n3",
                 "dim 3;\nranders;\na = identity\nb1 = 0.3*sin(x2)\nb2 = 0.2*x3\nb3 = 0.1*x1*x2\n",
                 default_domain(3)});
    f.push_back({"quartic-perturbed-n3",
                 "dim 3;\nL = exp(0.3*x1)*(y1^4 + y2^4 + y3^4)^0.25 + (0.2 + 0.1*sin(x2) + 0.1*x1*x3)*y1\n",
                 box(3, {{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}, {0.2, 1.2})});
    // stereographic chart of the unit 4-sphere
    f.push_back({"sphere-n4",
                 "dim 4;\nriemannian;\n"
                 "a11 = 4/(1 + x1^2 + x2^2 + x3^2 + x4^2)^2\n"
                 "a22 = 4/(1 + x1^2 + x2^2 + x3^2 + x4^2)^2\n"
                 "a33 = 4/(1 + x1^2 + x2^2 + x3^2 + x4^2)^2\n"
                 "a44 = 4/(1 + x1^2 + x2^2 + x3^2 + x4^2)^2\n",
                 default_domain(4)});
    return f;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw InputError("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

const std::vector<Fixture>& builtin_fixtures() {
    static const std::vector<Fixture> fixtures = make_fixtures();
    return fixtures;
}

std::pair<MetricSpec, ChartDomain> load_metric(const std::string& name_or_path) {
    namespace fs = std::filesystem;
    const Fixture* builtin = nullptr;
    for (const auto& f : builtin_fixtures())
        if (f.name == name_or_path) builtin = &f;

    if (const char* dir = std::getenv("FINSLER_FIXTURES"); dir && *dir) {
        const fs::path candidate = fs::path(dir) / (name_or_path + ".metric");
        if (fs::exists(candidate)) {
            MetricSpec s = parse_metric(read_file(candidate), name_or_path);
            ChartDomain d = builtin && builtin->domain.dim == s.dim ? builtin->domain : default_domain(s.dim);
            return {std::move(s), d};
        }
    }
    if (builtin) return {parse_metric(builtin->text, builtin->name), builtin->domain};

    const fs::path path(name_or_path);
    if (!fs::exists(path)) throw InputError("unknown metric or missing file: " + name_or_path);
    MetricSpec s = parse_metric(read_file(path), path.stem().string());
    ChartDomain d = default_domain(s.dim);
    return {std::move(s), d};
}

}  // namespace finsler
