#include "finsler/identities.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <Eigen/Dense>

namespace finsler {

namespace {

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

IdentityResult make(std::string group, std::string name, std::string statement, double residual, double scale,
                    double tol, long point) {
    IdentityResult r;
    r.group = std::move(group);
    r.name = std::move(name);
    r.statement = std::move(statement);
    r.residual = residual;
    r.scale = scale;
    r.tolerance = tol;
    r.point = point;
    r.verdict = residual <= tol * scale ? Verdict::holds : Verdict::fails;
    return r;
}

IdentityResult vacuous(std::string group, std::string name, std::string statement, std::string condition,
                       long point) {
    IdentityResult r;
    r.group = std::move(group);
    r.name = std::move(name);
    r.statement = std::move(statement);
    r.condition = std::move(condition);
    r.point = point;
    r.verdict = Verdict::not_applicable;
    return r;
}

// 0 when both agree, 1 otherwise; reported against unit scale
IdentityResult agreement(std::string group, std::string name, std::string statement, bool a, bool b, long point) {
    IdentityResult r = make(std::move(group), std::move(name), std::move(statement), a == b ? 0.0 : 1.0, 1.0, 0.5, point);
    r.params["verdicts"] = {a ? 1.0 : 0.0, b ? 1.0 : 0.0};
    return r;
}

// S(X,Y,Z,W) in global order from the local lowered S_hijk: S(X,Y,Z,W) = S_ZWXY
NumTensor to_global(const NumTensor& local) {
    const int n = local.dim();
    NumTensor g(n, 4);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z)
                for (int w = 0; w < n; ++w) g(x, y, z, w) = local(z, w, x, y);
    return g;
}

// The four curvature-type symmetries; returns {plane, first pair, pair exchange, cyclic} residuals.
std::array<double, 4> curvature_symmetries(const NumTensor& s) {
    const int n = s.dim();
    double plane = 0.0, first = 0.0, pair = 0.0, cyclic = 0.0;
    for (int h = 0; h < n; ++h)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    plane += std::pow(s(h, i, j, k) + s(h, i, k, j), 2);
                    first += std::pow(s(h, i, j, k) + s(i, h, j, k), 2);
                    pair += std::pow(s(h, i, j, k) - s(j, k, h, i), 2);
                    cyclic += std::pow(s(h, i, j, k) + s(h, j, k, i) + s(h, k, i, j), 2);
                }
    return {std::sqrt(plane), std::sqrt(first), std::sqrt(pair), std::sqrt(cyclic)};
}

// Frobenius norm of the contraction of slot p with y.
double slot_contraction(const NumTensor& t, int p, const std::vector<double>& y) {
    const int n = t.dim();
    const std::size_t stride = t.stride(p);
    double s = 0.0;
    for (std::size_t f = 0; f < t.size(); ++f) {
        if (t.index_at(f, p) != 0) continue;
        double c = 0.0;
        for (int m = 0; m < n; ++m) c += t[f + static_cast<std::size_t>(m) * stride] * y[static_cast<std::size_t>(m)];
        s += c * c;
    }
    return std::sqrt(s);
}

const PredicateResult& predicate(const std::vector<PredicateResult>& rs, const std::string& name) {
    return rs[static_cast<std::size_t>(predicate_id(name) - 1)];
}

bool holds(const std::vector<PredicateResult>& rs, const std::string& name) {
    return predicate(rs, name).verdict == Verdict::holds;
}

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double symmetric_draw(std::mt19937_64& rng) { return 2.0 * unit_draw(rng) - 1.0; }

// Random metric data at a point: SPD g, y, and the derived indicatory objects.
struct AlgebraFrame {
    int n = 0;
    NumTensor g, g_inv, phi, hbar;
    std::vector<double> y;
};

AlgebraFrame random_algebra_frame(int n, std::mt19937_64& rng) {
    AlgebraFrame a;
    a.n = n;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = symmetric_draw(rng);
    const Eigen::MatrixXd g = m * m.transpose() + Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd gi = g.inverse();
    a.g = NumTensor(n, 2);
    a.g_inv = NumTensor(n, 2);
    a.y.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        a.y[static_cast<std::size_t>(i)] = symmetric_draw(rng);
        for (int j = 0; j < n; ++j) {
            a.g(i, j) = g(i, j);
            a.g_inv(i, j) = gi(i, j);
        }
    }
    double l2 = 0.0;
    std::vector<double> ell(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            l2 += g(i, j) * a.y[static_cast<std::size_t>(i)] * a.y[static_cast<std::size_t>(j)];
            ell[static_cast<std::size_t>(i)] += g(i, j) * a.y[static_cast<std::size_t>(j)];
        }
    const double len = std::sqrt(l2);
    for (double& v : ell) v /= len;
    a.phi = NumTensor(n, 2);
    a.hbar = NumTensor(n, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a.phi(i, j) = (i == j ? 1.0 : 0.0) - a.y[static_cast<std::size_t>(i)] / len * ell[static_cast<std::size_t>(j)];
            a.hbar(i, j) = g(i, j) - ell[static_cast<std::size_t>(i)] * ell[static_cast<std::size_t>(j)];
        }
    return a;
}

// v_i = w_c phi^c_i, so v_i y^i = 0
NumTensor indicatory_vector(const AlgebraFrame& a, std::mt19937_64& rng) {
    std::vector<double> w(static_cast<std::size_t>(a.n));
    for (double& x : w) x = symmetric_draw(rng);
    NumTensor v(a.n, 1);
    for (int i = 0; i < a.n; ++i)
        for (int c = 0; c < a.n; ++c) v(i) += w[static_cast<std::size_t>(c)] * a.phi(c, i);
    return v;
}

// Random symmetric tensor with every slot projected by phi.
NumTensor admissible_cartan(const AlgebraFrame& a, std::mt19937_64& rng) {
    const int n = a.n;
    NumTensor t(n, 3);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = j; k < n; ++k) {
                const double v = symmetric_draw(rng);
                for (auto [p, q, r] : {std::array{i, j, k}, std::array{i, k, j}, std::array{j, i, k},
                                       std::array{j, k, i}, std::array{k, i, j}, std::array{k, j, i}})
                    t(p, q, r) = v;
            }
    NumTensor c(n, 3);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double s = 0.0;
                for (int p = 0; p < n; ++p)
                    for (int q = 0; q < n; ++q)
                        for (int r = 0; r < n; ++r) s += t(p, q, r) * a.phi(p, i) * a.phi(q, j) * a.phi(r, k);
                c(i, j, k) = s;
            }
    return c;
}

double sq_norm_up(const NumTensor& v, const NumTensor& g_inv) {
    double s = 0.0;
    for (int i = 0; i < v.dim(); ++i)
        for (int j = 0; j < v.dim(); ++j) s += g_inv(i, j) * v(i) * v(j);
    return s;
}

NumTensor rank_one(const NumTensor& v, double v2) {
    const int n = v.dim();
    NumTensor b(n, 3);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) b(i, j, k) = v(i) * v(j) * v(k) / v2;
    return b;
}

NumTensor reducible_part(const NumTensor& hbar, const NumTensor& v) {
    const int n = v.dim();
    NumTensor a(n, 3);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                a(i, j, k) = (hbar(i, j) * v(k) + hbar(j, k) * v(i) + hbar(k, i) * v(j)) / (n + 1);
    return a;
}

// Bound on the Frobenius norm of each product term of the S formula.
double s_formula_scale(const NumTensor& c, const NumTensor& g_inv) {
    const int n = c.dim();
    NumTensor up(n, 3);
    for (int m = 0; m < n; ++m)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int l = 0; l < n; ++l) up(m, a, b) += g_inv(m, l) * c(l, a, b);
    return 2.0 * frobenius(up) * frobenius(c);
}

}  // namespace

bool IdentityReport::passed() const {
    return std::none_of(results.begin(), results.end(), [](const auto& r) { return r.verdict == Verdict::fails; });
}

std::vector<const IdentityResult*> IdentityReport::group(const std::string& g) const {
    std::vector<const IdentityResult*> out;
    for (const auto& r : results)
        if (r.group == g) out.push_back(&r);
    return out;
}

double identity_tolerance(const std::string& group, const ToleranceConfig& tol) {
    static const std::map<std::string, double> builtin = {
        {"P1", 1e-9},  {"P2", 1e-9},  {"P3", 1e-9},  {"P4", 1e-9},  {"P5", 1e-8},  {"P6", 1e-9},
        {"P7", 1e-8},  {"P8", 1e-9},  {"ID2", 1e-7}, {"ID5", 1e-9}, {"ID6", 1e-7}, {"ID8", 1e-9},
        {"synthetic", 1e-12}};
    const auto it = builtin.find(group);
    return tol.get_or(group, it == builtin.end() ? tol.default_tolerance : it->second);
}

std::vector<IdentityResult> cartan_identities(const GeometryFrame& f, const GeometryFrame& half,
                                              const GeometryFrame& twice, const ToleranceConfig& tol) {
    const int n = f.dim;
    const auto& y = f.point.y;
    const double ynorm = norm(y);
    const double gnorm = frobenius(f.g);
    const long pt = -1;
    std::vector<IdentityResult> out;

    // P1
    {
        const double t = identity_tolerance("P1", tol);
        out.push_back(make("P1", "g_ij|k", "h-covariant derivative of g vanishes", frobenius(f.metric_h), f.scale("g|"), t, pt));
        out.push_back(make("P1", "g_ij||k", "v-covariant derivative of g vanishes", frobenius(f.metric_v), f.scale("g||"), t, pt));
        out.push_back(make("P1", "L|k", "h-covariant derivative of L vanishes", frobenius(f.length_h), f.scale("L|"), t, pt));
        out.push_back(make("P1", "hbar_ij|k", "h-covariant derivative of the angular metric vanishes", frobenius(f.angular_h), f.scale("hbar|"), t, pt));
    }
    // P2
    {
        const double t = identity_tolerance("P2", tol);
        double asym = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    const double c = f.cartan(i, j, k);
                    for (double o : {f.cartan(j, i, k), f.cartan(i, k, j), f.cartan(k, j, i)}) asym += (c - o) * (c - o);
                }
        out.push_back(make("P2", "C symmetric", "C_ijk is totally symmetric", std::sqrt(asym), frobenius(f.cartan), t, pt));
        out.push_back(make("P2", "C_ijk y^k", "C annihilates y", frobenius(contract_last(f.cartan, y)),
                           frobenius(f.cartan) * ynorm, t, pt));
        double gam = 0.0;
        for (int h = 0; h < n; ++h)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) gam += std::pow(f.connection(h, i, j) - f.connection(h, j, i), 2);
        out.push_back(make("P2", "Gamma symmetric", "Gamma^h_ij is symmetric in i, j", std::sqrt(gam), f.scale("Gamma"), t, pt));
    }
    // P3
    {
        const double t = identity_tolerance("P3", tol);
        const double s_scale = f.scale("S") * gnorm;
        NumTensor torsion_form(n, 4);  // g(T(X,W),T(Y,Z)) - g(T(Y,W),T(X,Z))
        for (int x = 0; x < n; ++x)
            for (int yy = 0; yy < n; ++yy)
                for (int z = 0; z < n; ++z)
                    for (int w = 0; w < n; ++w) {
                        double s = 0.0;
                        for (int m = 0; m < n; ++m)
                            s += f.cartan_mixed(m, x, w) * f.cartan(m, yy, z) - f.cartan_mixed(m, yy, w) * f.cartan(m, x, z);
                        torsion_form(x, yy, z, w) = s;
                    }
        const NumTensor s_global = to_global(f.v_curv_low);
        out.push_back(make("P3", "S from torsion", "S(X,Y,Z,W) = g(T(X,W),T(Y,Z)) - g(T(Y,W),T(X,Z))",
                           distance(s_global, torsion_form), s_scale + frobenius(torsion_form), t, pt));
        const auto sym = curvature_symmetries(f.v_curv_low);
        out.push_back(make("P3", "S plane antisymmetry", "S_hijk = -S_hikj", sym[0], 2.0 * s_scale, t, pt));
        out.push_back(make("P3", "S first-pair antisymmetry", "S_hijk = -S_ihjk", sym[1], 2.0 * s_scale, t, pt));
        out.push_back(make("P3", "S pair symmetry", "S_hijk = S_jkhi", sym[2], 2.0 * s_scale, t, pt));
        out.push_back(make("P3", "S cyclic", "S_hijk + S_hjki + S_hkij = 0", sym[3], 3.0 * s_scale, t, pt));
        double contr = 0.0;
        for (int p = 0; p < 4; ++p) contr = std::max(contr, slot_contraction(f.v_curv_low, p, y));
        out.push_back(make("P3", "S y-contractions", "every contraction of S with y vanishes", contr, s_scale * ynorm, t, pt));
    }
    // P4
    {
        const double t = identity_tolerance("P4", tol);
        NumTensor from_p(n, 3);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int h = 0; h < n; ++h) from_p(i, j, k) += y[static_cast<std::size_t>(h)] * f.hv_curv(i, h, j, k);
        out.push_back(make("P4", "Phat = C|0", "y^h P^i_hjk equals C^i_jk|0", distance(from_p, f.hv_torsion),
                           f.scale("P") * ynorm + f.scale("Phat"), t, pt));
        double asym = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) asym += std::pow(f.hv_torsion(i, j, k) - f.hv_torsion(i, k, j), 2);
        out.push_back(make("P4", "Phat symmetric", "Phat^i_jk is symmetric in j, k", std::sqrt(asym), 2.0 * f.scale("Phat"), t, pt));
        const double eta = std::max(slot_contraction(f.hv_curv, 2, y), slot_contraction(f.hv_curv, 3, y));
        out.push_back(make("P4", "P eta slots", "P vanishes with y in either plane slot", eta, f.scale("P") * ynorm, t, pt));
    }
    // P5
    {
        NumTensor d(n, 3);
        for (std::size_t q = 0; q < d.size(); ++q) d[q] = f.berwald[q] - f.connection[q] - f.hv_torsion[q];
        out.push_back(make("P5", "G = Gamma + C|0", "G^h_ij = Gamma^h_ij + C^h_ij|0", frobenius(d),
                           frobenius(f.berwald) + f.scale("Gamma") + f.scale("Phat"), identity_tolerance("P5", tol), pt));
    }
    // P6
    {
        const double t = identity_tolerance("P6", tol);
        struct Item {
            const char* name;
            NumTensor GeometryFrame::*field;
            int degree;
            const char* scale;
        };
        const Item items[] = {{"g", &GeometryFrame::g, 0, "g"},
                              {"hbar", &GeometryFrame::angular, 0, "g"},
                              {"C_ijk", &GeometryFrame::cartan, -1, "C"},
                              {"S^i_hjk", &GeometryFrame::v_curv, -2, "S"},
                              {"P^i_hjk", &GeometryFrame::hv_curv, -1, "P"},
                              {"R^i_hjk", &GeometryFrame::h_curv, 0, "R"},
                              {"Phat^i_jk", &GeometryFrame::hv_torsion, 0, "Phat"},
                              {"R^i_jk", &GeometryFrame::vh_torsion, 1, "Rt"}};
        for (const auto& it : items)
            for (const GeometryFrame* s : {&half, &twice}) {
                const double lambda = s == &half ? 0.5 : 2.0;
                const double factor = std::pow(lambda, it.degree);
                const NumTensor& base = f.*(it.field);
                const NumTensor& scaled = s->*(it.field);
                const double residual = distance(scaled, factor * base);
                const double scale = frobenius(scaled) + factor * frobenius(base) + s->scale(it.scale) + factor * f.scale(it.scale);
                auto r = make("P6", std::string(it.name) + " lambda=" + (lambda == 0.5 ? "0.5" : "2"),
                              "positively homogeneous of degree " + std::to_string(it.degree) + " in y", residual, scale, t, pt);
                r.params["degree"] = {static_cast<double>(it.degree)};
                out.push_back(std::move(r));
            }
    }
    // P7
    {
        NumTensor d(n, 4);
        for (int h = 0; h < n; ++h)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        d(h, i, j, k) = f.hv_curv_low(h, i, j, k) - f.hv_curv_low(h, i, k, j) +
                                        CurvatureConvention::kPSymmetrySign * f.v_curv_h0(h, i, j, k);
        auto r = make("P7", "P antisymmetry = -S|0", "P_hijk - P_hikj + S_hijk|0 = 0", frobenius(d),
                      2.0 * f.scale("P") * gnorm + f.scale("S|0"), identity_tolerance("P7", tol), pt);
        r.params["sign"] = {CurvatureConvention::kPSymmetrySign};
        out.push_back(std::move(r));
    }
    // P8
    {
        const double t = identity_tolerance("P8", tol);
        const NumTensor pr = apply_projection(f, f.h_curv_low, 0);
        out.push_back(make("P8", "projector idempotent", "P.(P.R) = P.R", distance(apply_projection(f, pr, 0), pr),
                           frobenius(pr) + f.scale("R") * gnorm, t, pt));
        out.push_back(make("P8", "hbar indicatory", "P.hbar = hbar", distance(apply_projection(f, f.angular, 0), f.angular),
                           frobenius(f.angular), t, pt));
        out.push_back(make("P8", "phi indicatory", "P.phi = phi", distance(apply_projection(f, f.phi, 1), f.phi),
                           frobenius(f.phi), t, pt));
        out.push_back(make("P8", "C indicatory", "P.C = C", distance(apply_projection(f, f.cartan, 0), f.cartan),
                           frobenius(f.cartan), t, pt));
        out.push_back(make("P8", "S indicatory", "P.S = S", distance(apply_projection(f, f.v_curv_low, 0), f.v_curv_low),
                           f.scale("S") * gnorm, t, pt));
    }
    return out;
}

namespace {

void c_reducible_consequences(const GeometryFrame& f, const std::vector<PredicateResult>& cls, const ToleranceConfig& tol,
                              long pt, std::vector<IdentityResult>& out) {
    const char* cond = "C-reducible holds at the point";
    if (!holds(cls, "c-reducible")) {
        for (const char* name : {"S closed form", "Ric^v closed form", "Sc^v closed form"})
            out.push_back(vacuous("ID2", name, "C-reducible consequence", cond, pt));
        return;
    }
    const int n = f.dim;
    const double t = identity_tolerance("ID2", tol);
    const double c2 = f.cartan_sq;
    const NumTensor& h = f.angular;
    const NumTensor& c = f.cartan_trace;
    const double k = 1.0 / ((n + 1.0) * (n + 1.0));
    NumTensor model(n, 4);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z)
                for (int w = 0; w < n; ++w)
                    model(x, y, z, w) = k * (c2 * h(x, w) * h(y, z) - c2 * h(y, w) * h(x, z) + h(x, w) * c(y) * c(z) +
                                             h(y, z) * c(x) * c(w) - h(y, w) * c(x) * c(z) - h(x, z) * c(y) * c(w));
    const NumTensor s = to_global(f.v_curv_low);
    out.push_back(make("ID2", "S closed form", "S of a C-reducible metric in terms of C_i and hbar", distance(s, model),
                       f.scale("S") * frobenius(f.g) + frobenius(model), t, pt));

    NumTensor ric(n, 2);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) ric(a, b) = (3.0 - n) * k * c(a) * c(b) - (n - 1.0) * k * c2 * h(a, b);
    out.push_back(make("ID2", "Ric^v closed form", "Ric^v = ((3-n) C_i C_j - (n-1) C^2 hbar_ij) / (n+1)^2",
                       distance(f.ricci_v, ric), frobenius(f.ricci_v) + frobenius(ric), t, pt));

    const double expected = (2.0 - n) / (n + 1.0);
    auto r = make("ID2", "Sc^v closed form", "Sc^v = (2-n)/(n+1) C^2", std::abs(f.scalar_v - expected * c2),
                  std::abs(f.scalar_v) + std::abs(expected) * c2, t, pt);
    r.params["ratio"] = {f.scalar_v / c2};
    r.params["expected"] = {expected};
    out.push_back(std::move(r));
}

void r3_chain(const GeometryFrame& f, const std::vector<PredicateResult>& cls, const ToleranceConfig& tol, long pt,
              std::vector<IdentityResult>& out) {
    const char* cond = "R3-like holds at the point";
    const bool r3 = f.dim >= 3 && holds(cls, "r3-like");
    if (!r3) {
        for (const char* name : {"R_hat from m_o, b, c", "H from m_o, c"})
            out.push_back(vacuous("ID5", name, "R3-like consequence", cond, pt));
        for (const char* name : {"R(X,Y)Z from F", "R_hat from F", "H from F", "F_o decomposition"})
            out.push_back(vacuous("ID8", name, "R3-like consequence", cond, pt));
    } else {
        const int n = f.dim;
        const auto& y = f.point.y;
        const double L = f.length;
        const DerivedTensors d = derived_tensors(f);
        const double r_scale = f.scale("R") * frobenius(f.g);
        NumTensor gy(n, 1);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) gy(i) += f.g(i, j) * y[static_cast<std::size_t>(j)];
        NumTensor f_eta(n, 1);  // F_o(eta)
        for (int i = 0; i < n; ++i)
            for (int x = 0; x < n; ++x) f_eta(i) += d.F_op(i, x) * y[static_cast<std::size_t>(x)];
        auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };

        // ID5 (e), (f)
        const double t5 = identity_tolerance("ID5", tol);
        NumTensor rhat(n, 3), h(n, 2);
        for (int i = 0; i < n; ++i)
            for (int x = 0; x < n; ++x) {
                h(i, x) = L * L * (d.m_op(i, x) + d.c * f.phi(i, x));
                for (int yy = 0; yy < n; ++yy)
                    rhat(i, x, yy) = L * (f.ell(x) * (d.m_op(i, yy) + d.c * f.phi(i, yy)) + d.b(x) * f.phi(i, yy)) -
                                     L * (f.ell(yy) * (d.m_op(i, x) + d.c * f.phi(i, x)) + d.b(yy) * f.phi(i, x));
            }
        out.push_back(make("ID5", "R_hat from m_o, b, c", "R(X,Y)eta rebuilt from m_o, b, c, phi", distance(d.R_hat, rhat),
                           r_scale * norm(y) + frobenius(rhat), t5, pt));
        out.push_back(make("ID5", "H from m_o, c", "H = L^2 (m_o + c phi)", distance(d.H, h),
                           r_scale * norm(y) * norm(y) + frobenius(h), t5, pt));

        // ID8 (a)-(d)
        const double t8 = identity_tolerance("ID8", tol);
        NumTensor ra(n, 4);  // (i, z, x, y) = [R(X,Y)Z]^i
        for (int i = 0; i < n; ++i)
            for (int z = 0; z < n; ++z)
                for (int x = 0; x < n; ++x)
                    for (int yy = 0; yy < n; ++yy)
                        ra(i, z, x, yy) = f.g(x, z) * d.F_op(i, yy) + d.F(x, z) * delta(i, yy) - f.g(yy, z) * d.F_op(i, x) -
                                          d.F(yy, z) * delta(i, x);
        out.push_back(make("ID8", "R(X,Y)Z from F", "R(X,Y)Z = g(X,Z)F_o(Y) + F(X,Z)Y - g(Y,Z)F_o(X) - F(Y,Z)X",
                           distance(f.h_curv, ra), f.scale("R") + frobenius(ra), t8, pt));
        NumTensor rb(n, 3);
        for (int i = 0; i < n; ++i)
            for (int x = 0; x < n; ++x)
                for (int yy = 0; yy < n; ++yy)
                    rb(i, x, yy) = gy(x) * d.F_op(i, yy) + d.Fb(x) * delta(i, yy) - gy(yy) * d.F_op(i, x) - d.Fb(yy) * delta(i, x);
        out.push_back(make("ID8", "R_hat from F", "R(X,Y)eta from F and F_o", distance(d.R_hat, rb),
                           f.scale("R") * norm(y) + frobenius(rb), t8, pt));
        NumTensor hc(n, 2);
        for (int i = 0; i < n; ++i)
            for (int x = 0; x < n; ++x)
                hc(i, x) = L * L * d.F_op(i, x) + d.c * L * L * delta(i, x) - gy(x) * f_eta(i) - d.Fb(x) * y[static_cast<std::size_t>(i)];
        out.push_back(make("ID8", "H from F", "H(Y) from F, F_o and c", distance(d.H, hc),
                           f.scale("R") * norm(y) * norm(y) + frobenius(hc), t8, pt));
        NumTensor fd(n, 2);
        for (int i = 0; i < n; ++i)
            for (int x = 0; x < n; ++x)
                fd(i, x) = d.m_op(i, x) + d.a_up(i) * f.ell(x) + d.b(x) * y[static_cast<std::size_t>(i)] / L +
                           d.c * f.ell(x) * y[static_cast<std::size_t>(i)] / L;
        out.push_back(make("ID8", "F_o decomposition", "F_o = m_o + a l + L^-1 b eta + c L^-1 l eta", distance(d.F_op, fd),
                           frobenius(d.F_op) + frobenius(fd), t8, pt));
    }

    // ID6
    const char* cond_p = "R3-like and p-scalar hold at the point";
    if (r3 && holds(cls, "p-scalar")) {
        const bool ok = holds(cls, "scalar-curvature") && holds(cls, "s-ps");
        auto r = make("ID6", "p-scalar implies s-ps", "R3-like with p-scalar curvature is of scalar and s-ps curvature",
                      ok ? 0.0 : 1.0, 1.0, 0.5, pt);
        r.condition = cond_p;
        out.push_back(std::move(r));
    } else {
        out.push_back(vacuous("ID6", "p-scalar implies s-ps", "R3-like implication", cond_p, pt));
    }
    const char* cond_s = "R3-like and scalar curvature hold at the point";
    if (r3 && holds(cls, "scalar-curvature")) {
        const int n = f.dim;
        const DerivedTensors d = derived_tensors(f);
        double tr = 0.0;
        for (int i = 0; i < n; ++i) tr += d.m_op(i, i);
        const double tval = tr / (n - 1);
        const NumTensor model = tval * f.phi;
        auto r = make("ID6", "scalar implies m_o = t phi", "m_o = t phi with t = Tr(m_o)/(n-1)", distance(d.m_op, model),
                      frobenius(d.m_op) + frobenius(model), identity_tolerance("ID6", tol), pt);
        r.params["t"] = {tval};
        r.condition = cond_s;
        if (!holds(cls, "p-scalar")) {
            r.verdict = Verdict::fails;
            r.params["p_scalar_failed"] = {1.0};
        }
        out.push_back(std::move(r));
    } else {
        out.push_back(vacuous("ID6", "scalar implies m_o = t phi", "R3-like implication", cond_s, pt));
    }
}

}  // namespace

IdentityReport run_identity_suite(const MetricSpec& spec, const std::vector<ChartPoint>& points,
                                  const ToleranceConfig& tol) {
    IdentityReport rep;
    rep.metric = spec.name;
    rep.dim = spec.dim;
    rep.points = points;

    std::vector<ChartPoint> all;
    for (const auto& p : points) {
        all.push_back(p);
        for (double lambda : {0.5, 2.0}) {
            ChartPoint q = p;
            for (double& v : q.y) v *= lambda;
            all.push_back(q);
        }
    }
    const auto frames = compute_frames(spec, all);
    std::vector<GeometryFrame> base;
    for (std::size_t i = 0; i < points.size(); ++i) base.push_back(frames[3 * i]);
    rep.classification = classify_frames(spec, base, tol);

    for (std::size_t i = 0; i < points.size(); ++i) {
        const long pt = static_cast<long>(i);
        const GeometryFrame& f = frames[3 * i];
        const auto& cls = rep.classification.per_point[i];
        for (auto r : cartan_identities(f, frames[3 * i + 1], frames[3 * i + 2], tol)) {
            r.point = pt;
            rep.results.push_back(std::move(r));
        }

        c_reducible_consequences(f, cls, tol, pt, rep.results);

        // ID3: P-symmetry and S|0 = 0 agree
        {
            const double t = tol.get("p-symmetric");
            const auto& ps = predicate(cls, "p-symmetric");
            const double s0 = frobenius(f.v_curv_h0);
            const double s0_scale = f.scale("S|0");
            const bool s0_zero = s0 <= t * s0_scale;
            auto r = agreement("ID3", "P-symmetric iff S|0 = 0", "P is symmetric exactly when the h(0)-derivative of S vanishes",
                               ps.verdict == Verdict::holds, s0_zero, pt);
            r.params["p_symmetry_ratio"] = {ps.scale > 0 ? ps.residual / ps.scale : 0.0};
            r.params["s_h0_ratio"] = {s0_scale > 0 ? s0 / s0_scale : 0.0};
            rep.results.push_back(std::move(r));
        }
        // ID4: S^v-recurrence collapses to S = 0
        {
            const double t = tol.get("sv-recurrent");
            const double s = frobenius(f.v_curv_low);
            const bool s_zero = s <= t * f.scale("S") * frobenius(f.g);
            for (const char* name : {"sv-recurrent", "sv-recurrent-2"}) {
                auto r = agreement("ID4", std::string(name) + " iff S = 0", "S^v-recurrence holds exactly when S vanishes",
                                   holds(cls, name), s_zero, pt);
                r.params["s_norm"] = {s};
                rep.results.push_back(std::move(r));
            }
        }

        r3_chain(f, cls, tol, pt, rep.results);

        // ID7
        {
            const char* cond = "C-reducible and general Landsberg hold at the point";
            if (holds(cls, "c-reducible") && holds(cls, "general-landsberg")) {
                const bool ok = holds(cls, "berwald");
                auto r = make("ID7", "C-reducible general Landsberg is Berwald",
                              "a C-reducible general Landsberg metric is Berwald", ok ? 0.0 : 1.0, 1.0, 0.5, pt);
                r.condition = cond;
                rep.results.push_back(std::move(r));
            } else {
                rep.results.push_back(vacuous("ID7", "C-reducible general Landsberg is Berwald", "implication", cond, pt));
            }
        }

        // implication lattice at the point
        {
            const auto v = check_implications(cls, i);
            auto r = make("lattice", "implication lattice", "no verdict pair contradicts the implication list",
                          static_cast<double>(v.size()), 1.0, 0.5, pt);
            for (const auto& e : v) r.condition += e.stronger + " => " + e.weaker + "; ";
            rep.results.push_back(std::move(r));
        }
    }
    return rep;
}

PlantedRecovery planted_semi_c_reducible(int dim, double mu, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const AlgebraFrame a = random_algebra_frame(dim, rng);
    const NumTensor v = indicatory_vector(a, rng);
    const double v2 = sq_norm_up(v, a.g_inv);
    PlantedRecovery out;
    out.mu = mu;
    out.tau = 1.0 - mu;
    const NumTensor c = mu * reducible_part(a.hbar, v) + out.tau * rank_one(v, v2);
    const auto fit = fit_semi_c_reducible(c, a.hbar, a.g_inv);
    out.fitted_mu = fit.mu;
    out.fitted_tau = fit.tau;
    return out;
}

std::vector<IdentityResult> synthetic_algebra_tests(std::uint64_t seed, int trials) {
    std::vector<IdentityResult> out;
    ToleranceConfig defaults;
    const double tol = identity_tolerance("synthetic", defaults);
    std::mt19937_64 rng(seed);
    for (int n : {3, 4, 5}) {
        const std::string tag = " n=" + std::to_string(n);
        double worst_rank_one = 0.0, worst_sym = 0.0, worst_plant = 0.0, worst_zero = 0.0;
        for (int trial = 0; trial < trials; ++trial) {
            const AlgebraFrame a = random_algebra_frame(n, rng);

            // rank-one C gives S = 0
            const NumTensor v = indicatory_vector(a, rng);
            const NumTensor c1 = rank_one(v, sq_norm_up(v, a.g_inv));
            const NumTensor s1 = v_curvature_from_cartan(c1, a.g_inv);
            worst_rank_one = std::max(worst_rank_one, max_abs(s1) / s_formula_scale(c1, a.g_inv));

            // arbitrary admissible C: curvature symmetries of S
            const NumTensor c2 = admissible_cartan(a, rng);
            const NumTensor s2 = v_curvature_from_cartan(c2, a.g_inv);
            const auto sym = curvature_symmetries(s2);
            double contr = 0.0;
            for (int p = 0; p < 4; ++p) contr = std::max(contr, slot_contraction(s2, p, a.y));
            const double sym_res = std::max({sym[0], sym[1], sym[2], sym[3], contr / std::max(norm(a.y), 1e-300)});
            worst_sym = std::max(worst_sym, sym_res / s_formula_scale(c2, a.g_inv));

            // planted (mu, tau)
            const double mu = unit_draw(rng);
            const NumTensor w = indicatory_vector(a, rng);
            const NumTensor c3 = mu * reducible_part(a.hbar, w) + (1.0 - mu) * rank_one(w, sq_norm_up(w, a.g_inv));
            const auto fit = fit_semi_c_reducible(c3, a.hbar, a.g_inv);
            worst_plant = std::max(worst_plant, std::max(std::abs(fit.mu - mu), std::abs(fit.tau - (1.0 - mu))));

            // C = 0
            const NumTensor zero(n, 3);
            const auto fz = fit_semi_c_reducible(zero, a.hbar, a.g_inv);
            worst_zero = std::max({worst_zero, max_abs(v_curvature_from_cartan(zero, a.g_inv)), fz.residual});
        }
        auto r1 = make("synthetic", "rank-one C gives S = 0" + tag, "C_ijk = C_i C_j C_k / C^2 yields S = 0",
                       worst_rank_one, 1.0, 1e-14, -1);
        r1.params["trials"] = {static_cast<double>(trials)};
        out.push_back(std::move(r1));
        out.push_back(make("synthetic", "S symmetries" + tag,
                           "S from any admissible C has curvature symmetries and annihilates y", worst_sym, 1.0, tol, -1));
        auto r3 = make("synthetic", "planted mu, tau recovered" + tag, "the semi-C-reducible fit inverts a planted (mu, tau)",
                       worst_plant, 1.0, tol, -1);
        r3.params["max_error"] = {worst_plant};
        out.push_back(std::move(r3));
        out.push_back(make("synthetic", "zero C" + tag, "C = 0 gives S = 0 and a zero fit residual", worst_zero, 1.0, tol, -1));
    }
    return out;
}

}  // namespace finsler
