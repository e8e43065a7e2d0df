#include "finsler/classifier.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

double inner(const NumTensor& a, const NumTensor& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double ratio(double residual, double scale) {
    if (residual == 0.0) return 0.0;
    if (scale <= 0.0) return std::numeric_limits<double>::infinity();
    return residual / scale;
}

// T_ijk = A_ij v_k + A_jk v_i + A_ki v_j
NumTensor cyclic3(const NumTensor& a, const NumTensor& v) {
    const int n = a.dim();
    NumTensor t(n, 3);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) t(i, j, k) = a(i, j) * v(k) + a(j, k) * v(i) + a(k, i) * v(j);
    return t;
}

// T_hijk = A_hj B_ik - A_hk B_ij (with both factors the same tensor by default)
NumTensor plane_product(const NumTensor& a, const NumTensor& b) {
    const int n = a.dim();
    NumTensor t(n, 4);
    for (int h = 0; h < n; ++h)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) t(h, i, j, k) = a(h, j) * b(i, k) - a(h, k) * b(i, j);
    return t;
}

// One-form fit T_{..., m} = lambda_m X for every value of the trailing slots.
struct TrailingFit {
    std::vector<double> lambda;
    double residual = 0.0;
    double fitted_norm = 0.0;
};

TrailingFit fit_trailing(const NumTensor& t, const NumTensor& x, int trailing) {
    std::size_t block = 1;
    for (int r = 0; r < trailing; ++r) block *= static_cast<std::size_t>(t.dim());
    const double xx = inner(x, x);
    TrailingFit out;
    out.lambda.assign(block, 0.0);
    double res = 0.0, fit = 0.0;
    for (std::size_t m = 0; m < block; ++m) {
        double num = 0.0;
        for (std::size_t f = 0; f < x.size(); ++f) num += t[f * block + m] * x[f];
        const double lam = xx > 0.0 ? num / xx : 0.0;
        out.lambda[m] = lam;
        for (std::size_t f = 0; f < x.size(); ++f) {
            const double d = t[f * block + m] - lam * x[f];
            res += d * d;
            fit += lam * lam * x[f] * x[f];
        }
    }
    out.residual = std::sqrt(res);
    out.fitted_norm = std::sqrt(fit);
    return out;
}

std::vector<double> flat(const NumTensor& t) { return t.data(); }

class PointClassifier {
public:
    PointClassifier(const GeometryFrame& f, const ToleranceConfig& tol) : f_(f), tol_(tol), n_(f.dim) {
        gnorm_ = frobenius(f.g);
        ynorm_ = 0.0;
        for (double v : f.point.y) ynorm_ += v * v;
        ynorm_ = std::sqrt(ynorm_);
        r_low_scale_ = f.scale("R") * gnorm_;
        p_low_scale_ = f.scale("P") * gnorm_;
    }

    std::vector<PredicateResult> run() {
        out_.clear();
        riemannian();
        locally_minkowskian();
        berwald();
        ch_recurrent();
        p_star();
        cv_recurrent();
        c0_recurrent();
        semi_family();
        quasi_c_reducible();
        s3_like();
        s4_like();
        sv_recurrent();
        sv_recurrent_2();
        landsberg();
        general_landsberg();
        p_symmetric();
        p2_like();
        p_reducible();
        h_isotropic();
        scalar_curvature();
        constant_curvature();
        r3_like();
        p_scalar();
        s_ps();
        std::sort(out_.begin(), out_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
        return out_;
    }

private:
    PredicateResult& add(int id, double residual, double scale) {
        PredicateResult r;
        r.id = id;
        r.name = predicate_names()[static_cast<std::size_t>(id - 1)];
        r.tolerance = tol_.get(r.name);
        r.residual = residual;
        r.scale = scale;
        r.verdict = residual <= r.tolerance * scale ? Verdict::holds : Verdict::fails;
        out_.push_back(std::move(r));
        return out_.back();
    }

    PredicateResult& not_applicable(int id, std::string note) {
        PredicateResult& r = add(id, 0.0, 0.0);
        r.verdict = Verdict::not_applicable;
        r.note = std::move(note);
        return r;
    }

    // max over parts of residual / scale, reported against unit scale
    PredicateResult& compound(int id, std::initializer_list<std::pair<double, double>> parts) {
        double worst = 0.0;
        for (auto [r, s] : parts) worst = std::max(worst, ratio(r, s));
        return add(id, worst, 1.0);
    }

    bool c_vanishes() const { return riemannian_holds_; }

    void riemannian() {
        const auto& r = add(1, frobenius(f_.cartan), gnorm_ / f_.length);
        riemannian_holds_ = r.verdict == Verdict::holds;
    }

    void locally_minkowskian() {
        auto& r = compound(2, {{frobenius(f_.cartan_mixed_h), f_.scale("C^|")}, {frobenius(f_.h_curv), f_.scale("R")}});
        r.note = "max of C^i_jk|h and R^h_ijk ratios";
    }

    void berwald() { add(3, frobenius(f_.cartan_mixed_h), f_.scale("C^|")); }

    void ch_recurrent() {
        const auto fit = fit_trailing(f_.cartan_h, f_.cartan, 1);
        auto& r = add(4, fit.residual, f_.scale("C|") + fit.fitted_norm);
        r.params["mu"] = fit.lambda;
    }

    void p_star() {
        double num = 0.0;
        for (int i = 0; i < n_; ++i) num += f_.cartan_trace_h0(i) * f_.cartan_trace_up(i);
        const double lambda = f_.cartan_sq > 0.0 ? num / f_.cartan_sq : 0.0;
        const NumTensor diff = f_.hv_torsion - lambda * f_.cartan_mixed;
        auto& r = add(5, frobenius(diff), f_.scale("Phat") + std::abs(lambda) * frobenius(f_.cartan_mixed));
        r.params["lambda"] = {lambda};
    }

    void cv_recurrent() {
        const auto fit = fit_trailing(f_.cartan_v, f_.cartan, 1);
        auto& r = add(6, fit.residual, f_.scale("C||") + fit.fitted_norm);
        r.params["lambda"] = fit.lambda;
    }

    void c0_recurrent() {
        const auto fit = fit_trailing(f_.cartan_dot, f_.cartan, 1);
        auto& r = add(7, fit.residual, f_.scale("Cdot") + fit.fitted_norm);
        r.params["lambda"] = fit.lambda;
    }

    void semi_family() {
        if (n_ < 3) {
            for (int id : {8, 9, 10}) not_applicable(id, "needs n >= 3");
            return;
        }
        if (c_vanishes()) {
            for (int id : {8, 9, 10}) not_applicable(id, "C vanishes at tolerance");
            return;
        }
        const auto fit = fit_semi_c_reducible(f_.cartan, f_.angular, f_.g_inv);
        auto& semi = add(8, fit.residual, fit.scale);
        semi.params["mu"] = {fit.mu};
        semi.params["tau"] = {fit.tau};

        const NumTensor a = (1.0 / (n_ + 1)) * cyclic3(f_.angular, f_.cartan_trace);
        add(9, distance(f_.cartan, a), frobenius(f_.cartan) + frobenius(a));

        NumTensor b(n_, 3);
        const NumTensor& ci = f_.cartan_trace;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                for (int k = 0; k < n_; ++k) b(i, j, k) = ci(i) * ci(j) * ci(k) / f_.cartan_sq;
        add(10, distance(f_.cartan, b), frobenius(f_.cartan) + frobenius(b));
    }

    void quasi_c_reducible() {
        if (n_ < 3) {
            not_applicable(11, "needs n >= 3");
            return;
        }
        if (c_vanishes()) {
            not_applicable(11, "C vanishes at tolerance");
            return;
        }
        // A = phi^T B phi keeps A_ij y^j = 0; unknowns are the symmetric entries of B
        std::vector<std::pair<int, int>> slots;
        for (int a = 0; a < n_; ++a)
            for (int b = a; b < n_; ++b) slots.emplace_back(a, b);
        const auto basis = [&](int a, int b) {
            NumTensor e(n_, 2);
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    e(i, j) = f_.phi(a, i) * f_.phi(b, j) + (a == b ? 0.0 : f_.phi(b, i) * f_.phi(a, j));
            return e;
        };
        const std::size_t rows = f_.cartan.size();
        Eigen::MatrixXd design(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(slots.size()));
        std::vector<NumTensor> bases;
        for (std::size_t c = 0; c < slots.size(); ++c) {
            bases.push_back(basis(slots[c].first, slots[c].second));
            const NumTensor col = cyclic3(bases.back(), f_.cartan_trace);
            for (std::size_t q = 0; q < rows; ++q) design(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(c)) = col[q];
        }
        const Eigen::Map<const Eigen::VectorXd> rhs(f_.cartan.data().data(), static_cast<Eigen::Index>(rows));
        const Eigen::VectorXd coef = design.completeOrthogonalDecomposition().solve(rhs);
        NumTensor a(n_, 2);
        for (std::size_t c = 0; c < slots.size(); ++c) a = a + coef(static_cast<Eigen::Index>(c)) * bases[c];
        const NumTensor fitted = cyclic3(a, f_.cartan_trace);
        auto& r = add(11, distance(f_.cartan, fitted), frobenius(f_.cartan) + frobenius(fitted));
        r.params["A"] = flat(a);
    }

    void s3_like() {
        if (n_ < 4) {
            not_applicable(12, "needs n >= 4");
            return;
        }
        const double k = f_.scalar_v / ((n_ - 1) * (n_ - 2));
        // (hbar_ik hbar_lj - hbar_ij hbar_lk) in slots (l, i, j, k)
        const NumTensor model = k * plane_product(f_.angular, f_.angular);
        auto& r = add(12, distance(f_.v_curv_low, model), f_.scale("S") * gnorm_ + frobenius(model));
        r.params["Sc_v"] = {f_.scalar_v};
    }

    void s4_like() {
        if (n_ < 5) {
            not_applicable(13, "needs n >= 5");
            return;
        }
        NumTensor fv(n_, 2);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                fv(i, j) = (f_.ricci_v(i, j) - f_.scalar_v * f_.angular(i, j) / (2.0 * (n_ - 2))) / (n_ - 3);
        const NumTensor model = plane_product(f_.angular, fv) + plane_product(fv, f_.angular);
        add(13, distance(f_.v_curv_low, model), f_.scale("S") * gnorm_ + frobenius(model));
    }

    void sv_recurrent() {
        const auto fit = fit_trailing(f_.v_curv_v, f_.v_curv_low, 1);
        auto& r = add(14, fit.residual, f_.scale("S||") + fit.fitted_norm);
        r.params["lambda"] = fit.lambda;
    }

    void sv_recurrent_2() {
        const auto fit = fit_trailing(f_.v_curv_vv, f_.v_curv_low, 2);
        auto& r = add(15, fit.residual, f_.scale("S||||") + fit.fitted_norm);
        r.params["lambda"] = fit.lambda;
    }

    void landsberg() { add(16, frobenius(f_.hv_torsion), f_.scale("Phat")); }

    void general_landsberg() { add(17, frobenius(f_.cartan_trace_h0), f_.scale("C_i|0")); }

    void p_symmetric() {
        NumTensor d(n_, 4);
        for (int h = 0; h < n_; ++h)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    for (int k = 0; k < n_; ++k) d(h, i, j, k) = f_.hv_curv_low(h, i, j, k) - f_.hv_curv_low(h, i, k, j);
        add(18, frobenius(d), 2.0 * p_low_scale_);
    }

    void p2_like() {
        if (n_ < 3) {
            not_applicable(19, "needs n >= 3");
            return;
        }
        if (c_vanishes()) {
            not_applicable(19, "C vanishes at tolerance");
            return;
        }
        const std::size_t rows = f_.hv_curv_low.size();
        Eigen::MatrixXd design = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), n_);
        for (int h = 0; h < n_; ++h)
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    for (int k = 0; k < n_; ++k) {
                        const auto q = static_cast<Eigen::Index>(((h * n_ + i) * n_ + j) * n_ + k);
                        design(q, h) += f_.cartan(i, j, k);
                        design(q, i) -= f_.cartan(h, j, k);
                    }
        const Eigen::Map<const Eigen::VectorXd> rhs(f_.hv_curv_low.data().data(), static_cast<Eigen::Index>(rows));
        const Eigen::VectorXd alpha = design.completeOrthogonalDecomposition().solve(rhs);
        const Eigen::VectorXd fitted = design * alpha;
        auto& r = add(19, (rhs - fitted).norm(), p_low_scale_ + fitted.norm());
        r.params["alpha"] = std::vector<double>(alpha.data(), alpha.data() + alpha.size());
    }

    void p_reducible() {
        if (n_ < 3) {
            not_applicable(20, "needs n >= 3");
            return;
        }
        const NumTensor p_low = contract_last(f_.cartan_h, f_.point.y);  // C_ijk|0
        const NumTensor model = (1.0 / (n_ + 1)) * cyclic3(f_.angular, f_.cartan_trace_h0);
        add(20, distance(p_low, model), f_.scale("C|0") + frobenius(model));
    }

    void h_isotropic() {
        const NumTensor q = plane_product(f_.g, f_.g);
        const double qq = inner(q, q);
        const double k0 = qq > 0.0 ? inner(f_.h_curv_low, q) / qq : 0.0;
        const NumTensor model = k0 * q;
        auto& r = add(21, distance(f_.h_curv_low, model), r_low_scale_ + frobenius(model));
        r.params["k0"] = {k0};
    }

    void scalar_curvature() {
        const auto& y = f_.point.y;
        NumTensor m(n_, 2), q(n_, 2);
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < n_; ++k) {
                for (int h = 0; h < n_; ++h)
                    for (int j = 0; j < n_; ++j) m(i, k) += f_.h_curv_low(h, i, j, k) * y[static_cast<std::size_t>(h)] * y[static_cast<std::size_t>(j)];
                q(i, k) = f_.length * f_.length * f_.angular(i, k);
            }
        const double qq = inner(q, q);
        scalar_k_ = qq > 0.0 ? inner(m, q) / qq : 0.0;
        const NumTensor model = scalar_k_ * q;
        auto& r = add(22, distance(m, model), r_low_scale_ * ynorm_ * ynorm_ + frobenius(model));
        r.params["k"] = {scalar_k_};
        scalar_ratio_ = {r.residual, r.scale};
    }

    void constant_curvature() {
        auto& r = add(23, scalar_ratio_.first, scalar_ratio_.second);
        r.params["k"] = {scalar_k_};
        r.note = "constancy of k is checked across points";
    }

    void r3_like() {
        if (n_ < 4) {
            not_applicable(24, "needs n >= 4");
            return;
        }
        const DerivedTensors d = derived_tensors(f_);
        const NumTensor& g = f_.g;
        NumTensor e(n_, 4);
        for (int x = 0; x < n_; ++x)
            for (int y = 0; y < n_; ++y)
                for (int z = 0; z < n_; ++z)
                    for (int w = 0; w < n_; ++w)
                        e(x, y, z, w) = g(x, z) * d.F(y, w) + g(y, w) * d.F(x, z) - g(y, z) * d.F(x, w) - g(x, w) * d.F(y, z);
        const double direct = distance(d.R_global, e);
        const double psi = frobenius(d.Psi);
        auto& r = add(24, direct, r_low_scale_ + 4.0 * gnorm_ * d.scale_F);
        r.params["psi_residual"] = {psi};
        r.params["psi_scale"] = {d.scale_Psi};
        r.params["dual_gap"] = {std::abs(direct - psi)};
    }

    void p_scalar() {
        const NumTensor pr = apply_projection(f_, f_.h_curv_low, 0);
        // hbar_ik hbar_hj - hbar_ij hbar_hk in slots (h, i, j, k)
        const NumTensor q = plane_product(f_.angular, f_.angular);
        const double qq = inner(q, q);
        // at n = 2 hbar has rank one and q is pure rounding
        const double hh = inner(f_.angular, f_.angular);
        const double r0 = qq > 1e-20 * hh * hh ? inner(pr, q) / qq : 0.0;
        const NumTensor model = r0 * q;
        auto& r = add(25, distance(pr, model), r_low_scale_ + frobenius(model));
        r.params["R0"] = {r0};
        pscalar_ratio_ = {r.residual, r.scale};
    }

    void s_ps() {
        auto& r = compound(26, {scalar_ratio_, pscalar_ratio_});
        r.note = "max of scalar-curvature and p-scalar ratios";
    }

    const GeometryFrame& f_;
    const ToleranceConfig& tol_;
    int n_;
    double gnorm_ = 0.0, ynorm_ = 0.0, r_low_scale_ = 0.0, p_low_scale_ = 0.0;
    bool riemannian_holds_ = false;
    double scalar_k_ = 0.0;
    std::pair<double, double> scalar_ratio_, pscalar_ratio_;
    std::vector<PredicateResult> out_;
};

}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::fails: return "fails";
        case Verdict::not_applicable: return "not-applicable";
    }
    return "?";
}

const std::vector<std::string>& predicate_names() {
    static const std::vector<std::string> names = {
        "riemannian",        "locally-minkowskian", "berwald",        "ch-recurrent",       "p-star",
        "cv-recurrent",      "c0-recurrent",        "semi-c-reducible", "c-reducible",      "c2-like",
        "quasi-c-reducible", "s3-like",             "s4-like",        "sv-recurrent",       "sv-recurrent-2",
        "landsberg",         "general-landsberg",   "p-symmetric",    "p2-like",            "p-reducible",
        "h-isotropic",       "scalar-curvature",    "constant-curvature", "r3-like",        "p-scalar",
        "s-ps"};
    return names;
}

int predicate_id(const std::string& name) {
    const auto& names = predicate_names();
    const auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? 0 : static_cast<int>(it - names.begin()) + 1;
}

double ToleranceConfig::get(const std::string& name) const {
    const auto it = overrides.find(name);
    return it == overrides.end() ? default_tolerance : it->second;
}

double ToleranceConfig::get_or(const std::string& name, double fallback) const {
    const auto it = overrides.find(name);
    return it == overrides.end() ? fallback : it->second;
}

const std::vector<std::string>& identity_groups() {
    static const std::vector<std::string> groups = {"P1",  "P2",  "P3",  "P4",  "P5",  "P6",  "P7",  "P8",
                                                    "ID2", "ID3", "ID4", "ID5", "ID6", "ID7", "ID8", "synthetic"};
    return groups;
}

void ToleranceConfig::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw InputError("tolerance override must be NAME=VALUE: " + assignment);
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(assignment.substr(0, eq));
    const std::string text = trim(assignment.substr(eq + 1));
    double value = 0.0;
    try {
        std::size_t used = 0;
        value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw InputError("tolerance value is not a number: " + text);
    }
    if (!(value > 0.0)) throw InputError("tolerance must be positive: " + key);
    if (key == "default") {
        default_tolerance = value;
        return;
    }
    const auto& groups = identity_groups();
    if (predicate_id(key) == 0 && std::find(groups.begin(), groups.end(), key) == groups.end())
        throw InputError("unknown predicate in tolerance config: " + key);
    overrides[key] = value;
}

void ToleranceConfig::merge_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        set(line);
    }
}

NumTensor cartan_trace(const NumTensor& c, const NumTensor& g_inv) {
    const int n = c.dim();
    NumTensor t(n, 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) t(i) += g_inv(j, k) * c(i, j, k);
    return t;
}

NumTensor v_curvature_from_cartan(const NumTensor& c, const NumTensor& g_inv) {
    const int n = c.dim();
    NumTensor up(n, 3);
    for (int m = 0; m < n; ++m)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int l = 0; l < n; ++l) up(m, a, b) += g_inv(m, l) * c(l, a, b);
    NumTensor s(n, 4);
    for (int h = 0; h < n; ++h)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double v = 0.0;
                    for (int m = 0; m < n; ++m) v += up(m, h, k) * c(i, m, j) - up(m, h, j) * c(i, m, k);
                    s(h, i, j, k) = v;
                }
    return s;
}

SemiReducibleFit fit_semi_c_reducible(const NumTensor& c, const NumTensor& hbar, const NumTensor& g_inv) {
    const int n = c.dim();
    const NumTensor ci = cartan_trace(c, g_inv);
    double c2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c2 += g_inv(i, j) * ci(i) * ci(j);
    SemiReducibleFit fit;
    const NumTensor a = (1.0 / (n + 1)) * cyclic3(hbar, ci);
    NumTensor b(n, 3);
    if (c2 > 0.0)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) b(i, j, k) = ci(i) * ci(j) * ci(k) / c2;
    // C - B = mu (A - B)
    const NumTensor ab = a - b;
    const double den = inner(ab, ab);
    fit.mu = den > 0.0 ? inner(c - b, ab) / den : 0.0;
    fit.tau = 1.0 - fit.mu;
    const NumTensor model = fit.mu * a + fit.tau * b;
    fit.residual = distance(c, model);
    fit.scale = frobenius(c) + std::abs(fit.mu) * frobenius(a) + std::abs(fit.tau) * frobenius(b);
    return fit;
}

std::vector<PredicateResult> classify_point(const GeometryFrame& frame, const ToleranceConfig& tol) {
    return PointClassifier(frame, tol).run();
}

const std::vector<std::pair<std::string, std::string>>& implication_lattice() {
    static const std::vector<std::pair<std::string, std::string>> edges = {
        {"locally-minkowskian", "berwald"},
        {"berwald", "landsberg"},
        {"landsberg", "general-landsberg"},
        {"berwald", "ch-recurrent"},
        {"berwald", "p-star"},
        {"c-reducible", "semi-c-reducible"},
        {"semi-c-reducible", "quasi-c-reducible"},
        {"c2-like", "semi-c-reducible"},
        {"constant-curvature", "scalar-curvature"},
        {"c-reducible", "p-reducible"},
    };
    return edges;
}

std::vector<ImplicationViolation> check_implications(const std::vector<PredicateResult>& results, std::size_t point) {
    auto verdict = [&](const std::string& name) {
        for (const auto& r : results)
            if (r.name == name) return r.verdict;
        return Verdict::not_applicable;
    };
    std::vector<ImplicationViolation> out;
    for (const auto& [strong, weak] : implication_lattice())
        if (verdict(strong) == Verdict::holds && verdict(weak) == Verdict::fails) out.push_back({point, strong, weak});
    // Riemannian forces every C-shape predicate to not-applicable
    if (verdict("riemannian") == Verdict::holds)
        for (const char* shape : {"semi-c-reducible", "c-reducible", "c2-like", "quasi-c-reducible", "p2-like"})
            if (verdict(shape) != Verdict::not_applicable) out.push_back({point, "riemannian", shape});
    return out;
}

const AggregateResult& ClassificationReport::find(const std::string& name) const {
    for (const auto& a : aggregate)
        if (a.name == name) return a;
    throw std::out_of_range("no aggregate for " + name);
}

std::vector<GeometryFrame> compute_frames(const MetricSpec& spec, const std::vector<ChartPoint>& points) {
    std::vector<GeometryFrame> frames(points.size());
    const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    if (workers == 1 || points.size() < 2) {
        for (std::size_t i = 0; i < points.size(); ++i) frames[i] = compute_frame(spec, points[i]);
        return frames;
    }
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < points.size(); i += workers) frames[i] = compute_frame(spec, points[i]);
        }));
    for (auto& j : jobs) j.get();
    return frames;
}

ClassificationReport classify_frames(const MetricSpec& spec, const std::vector<GeometryFrame>& frames,
                                     const ToleranceConfig& tol) {
    ClassificationReport rep;
    rep.metric = spec.name;
    rep.dim = spec.dim;
    for (std::size_t p = 0; p < frames.size(); ++p) {
        rep.points.push_back(frames[p].point);
        rep.per_point.push_back(classify_point(frames[p], tol));
        const auto v = check_implications(rep.per_point.back(), p);
        rep.violations.insert(rep.violations.end(), v.begin(), v.end());
    }

    const auto& names = predicate_names();
    for (std::size_t q = 0; q < names.size(); ++q) {
        AggregateResult a;
        a.name = names[q];
        for (const auto& pt : rep.per_point) {
            const auto& r = pt[q];
            if (r.verdict == Verdict::holds) ++a.holds;
            else if (r.verdict == Verdict::fails) ++a.fails;
            else ++a.not_applicable;
            if (r.verdict != Verdict::not_applicable)
                a.worst_ratio = std::max(a.worst_ratio, ratio(r.residual, r.tolerance * r.scale));
        }
        a.verdict = a.fails > 0 ? Verdict::fails : a.holds > 0 ? Verdict::holds : Verdict::not_applicable;
        rep.aggregate.push_back(std::move(a));
    }

    // spreads of fitted parameters
    for (std::size_t q = 0; q < names.size(); ++q) {
        if (rep.per_point.empty()) break;
        for (const auto& [param, first] : rep.per_point.front()[q].params) {
            SpreadDiagnostic s;
            s.predicate = names[q];
            s.param = param;
            std::vector<double> lo = first, hi = first, sum(first.size(), 0.0);
            bool uniform = true;
            for (const auto& pt : rep.per_point) {
                const auto it = pt[q].params.find(param);
                if (it == pt[q].params.end() || it->second.size() != first.size()) {
                    uniform = false;
                    break;
                }
                for (std::size_t c = 0; c < first.size(); ++c) {
                    lo[c] = std::min(lo[c], it->second[c]);
                    hi[c] = std::max(hi[c], it->second[c]);
                    sum[c] += it->second[c];
                }
            }
            if (!uniform) continue;
            for (std::size_t c = 0; c < first.size(); ++c) {
                s.spread.push_back(hi[c] - lo[c]);
                s.mean.push_back(sum[c] / static_cast<double>(rep.per_point.size()));
            }
            rep.spreads.push_back(std::move(s));
        }
    }

    // constant curvature: k must not vary across points
    auto& cc = rep.aggregate[static_cast<std::size_t>(predicate_id("constant-curvature") - 1)];
    if (cc.verdict == Verdict::holds) {
        for (const auto& s : rep.spreads)
            if (s.predicate == "constant-curvature" && s.param == "k") {
                const double allowed = 1e-6 * (1.0 + std::abs(s.mean[0]));
                if (s.spread[0] > allowed) {
                    cc.verdict = Verdict::fails;
                    std::ostringstream msg;
                    msg << "k varies across points (spread " << s.spread[0] << ")";
                    cc.note = msg.str();
                } else {
                    cc.note = "k constant across points";
                }
            }
    }
    if (rep.points.size() < 2) cc.note = "constancy needs at least two points";
    return rep;
}

ClassificationReport classify_manifold(const MetricSpec& spec, const ChartDomain& domain, int count,
                                       const ToleranceConfig& tol) {
    const auto points = sample_points(spec, domain, count);
    return classify_frames(spec, compute_frames(spec, points), tol);
}

}  // namespace finsler
