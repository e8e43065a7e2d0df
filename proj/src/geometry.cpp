#include "finsler/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

constexpr int kJetMaxX = 2;
// Fifth order in y is needed only for G^h_ijk; everything else stops at four.
constexpr int kJetMaxTotal = 5;

}  // namespace

NumTensor values(const JetTensor& t) {
    NumTensor out(t.dim(), t.rank());
    for (std::size_t f = 0; f < t.size(); ++f) out[f] = t[f].value();
    return out;
}

NumTensor contract_last(const NumTensor& t, const std::vector<double>& v) {
    const int n = t.dim();
    NumTensor out(n, t.rank() - 1);
    for (std::size_t f = 0; f < out.size(); ++f) {
        double s = 0.0;
        for (int m = 0; m < n; ++m) s += t[f * static_cast<std::size_t>(n) + static_cast<std::size_t>(m)] * v[static_cast<std::size_t>(m)];
        out[f] = s;
    }
    return out;
}

FrameContext::FrameContext(const MetricSpec& spec, const ChartPoint& point)
    : n_(spec.dim), point_(point) {
    const int n = n_;
    if (static_cast<int>(point.x.size()) != n || static_cast<int>(point.y.size()) != n)
        throw InputError("chart point dimension differs from the metric");
    space_ = std::make_shared<const JetSpace>(n, kJetMaxX, kJetMaxTotal);
    const JetSpace* sp = space_.get();

    energy_ = evaluate_jet(spec.energy_expr(), *sp, point);
    if (!(energy_.value() > 0.0)) throw EvaluationError("L is not positive at the chart point");
    length_ = sqrt(energy_ * 2.0);

    std::vector<Jet> ey(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ey[static_cast<std::size_t>(i)] = energy_.dy(i);

    g_ = JetTensor(n, 2);
    Eigen::MatrixXd g0(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            g_(i, j) = ey[static_cast<std::size_t>(i)].dy(j);
            g_(j, i) = g_(i, j);
            g0(i, j) = g0(j, i) = g_(i, j).value();
        }
    if (!g0.allFinite()) throw EvaluationError("metric tensor is not finite");
    det_g_ = g0.determinant();
    const double gmax = g0.cwiseAbs().maxCoeff();
    if (!(gmax > 0.0) || std::abs(det_g_) < 1e-10 * std::pow(gmax, n))
        throw DegenerateMetric("det g = " + std::to_string(det_g_) + " below the degeneracy floor");
    const Eigen::MatrixXd inv0 = g0.inverse();

    // g^{-1} = sum_k (-A^{-1} D)^k A^{-1} with A = g(point), D = g - A
    JetTensor delta(n, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            delta(i, j) = g_(i, j);
            delta(i, j) -= Jet(sp, g0(i, j));
        }
    JetTensor x(n, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) x(i, j) = Jet(sp, inv0(i, j));
    for (int it = 0; it < g_(0, 0).valid_total(); ++it) {
        JetTensor dx(n, 2, Jet(sp, 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) dx(i, j).fma(delta(i, k), x(k, j));
        JetTensor next(n, 2);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Jet acc(sp, inv0(i, j));
                for (int k = 0; k < n; ++k) acc -= dx(k, j) * inv0(i, k);
                next(i, j) = std::move(acc);
            }
        x = std::move(next);
    }
    ginv_ = JetTensor(n, 2);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            ginv_(i, j) = (x(i, j) + x(j, i)) * 0.5;
            ginv_(j, i) = ginv_(i, j);
        }

    cartan_ = JetTensor(n, 3);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = j; k < n; ++k) {
                const Jet c = g_(i, j).dy(k) * 0.5;
                for (auto [a, b, d] : {std::array{i, j, k}, std::array{i, k, j}, std::array{j, i, k},
                                       std::array{j, k, i}, std::array{k, i, j}, std::array{k, j, i}})
                    cartan_(a, b, d) = c;
            }
    cartan_m_ = JetTensor(n, 3, Jet(sp, 0.0));
    for (int h = 0; h < n; ++h)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Jet acc(sp, 0.0);
                for (int l = 0; l < n; ++l) acc.fma(ginv_(h, l), cartan_(l, i, j));
                cartan_m_(h, i, j) = acc;
                cartan_m_(h, j, i) = std::move(acc);
            }

    // G^h = 1/2 g^{hl} (E_{x^k y^l} y^k - E_{x^l})
    std::vector<Jet> w(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
        Jet acc = -energy_.dx(l);
        for (int k = 0; k < n; ++k) acc.fma(energy_.dx(k).dy(l), y(k));
        w[static_cast<std::size_t>(l)] = std::move(acc);
    }
    spray_ = JetTensor(n, 1);
    for (int h = 0; h < n; ++h) {
        Jet acc(sp, 0.0);
        for (int l = 0; l < n; ++l) acc.fma(ginv_(h, l), w[static_cast<std::size_t>(l)], 0.5);
        spray_(h) = std::move(acc);
    }
    barthel_ = JetTensor(n, 2);
    for (int h = 0; h < n; ++h)
        for (int i = 0; i < n; ++i) barthel_(h, i) = spray_(h).dy(i);
    berwald_ = JetTensor(n, 3);
    for (int h = 0; h < n; ++h)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                berwald_(h, i, j) = barthel_(h, i).dy(j);
                berwald_(h, j, i) = berwald_(h, i, j);
            }

    // Gamma^h_ij = 1/2 g^{hl} (delta_i g_lj + delta_j g_il - delta_l g_ij)
    const JetTensor dg = horizontal(g_);  // dg(a, b, k) = delta_k g_ab
    gamma_ = JetTensor(n, 3);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                Jet low = dg(l, j, i) + dg(i, l, j) - dg(i, j, l);
                low *= 0.5;
                for (int h = 0; h < n; ++h) {
                    if (l == 0) gamma_(h, i, j) = Jet(sp, 0.0);
                    gamma_(h, i, j).fma(ginv_(h, l), low);
                }
            }
    for (int h = 0; h < n; ++h)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j) gamma_(h, i, j) = gamma_(h, j, i);
}

JetTensor FrameContext::horizontal(const JetTensor& t) const {
    const int n = n_;
    JetTensor out(n, t.rank() + 1);
    for (std::size_t f = 0; f < t.size(); ++f) {
        std::vector<Jet> dy(static_cast<std::size_t>(n));
        for (int m = 0; m < n; ++m) dy[static_cast<std::size_t>(m)] = t[f].dy(m);
        for (int k = 0; k < n; ++k) {
            Jet acc = t[f].dx(k);
            for (int m = 0; m < n; ++m) acc.fma(barthel_(m, k), dy[static_cast<std::size_t>(m)], -1.0);
            out[f * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)] = std::move(acc);
        }
    }
    return out;
}

JetTensor FrameContext::vertical(const JetTensor& t) const {
    const int n = n_;
    JetTensor out(n, t.rank() + 1);
    for (std::size_t f = 0; f < t.size(); ++f)
        for (int k = 0; k < n; ++k) out[f * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)] = t[f].dy(k);
    return out;
}

CovDerivative FrameContext::h_cov(const JetTensor& t, int upper, bool keep_jets) const {
    return covariant(t, upper, true, keep_jets);
}

CovDerivative FrameContext::v_cov(const JetTensor& t, int upper, bool keep_jets) const {
    return covariant(t, upper, false, keep_jets);
}

CovDerivative FrameContext::covariant(const JetTensor& t, int upper, bool horiz, bool keep_jets) const {
    const int n = n_;
    const int r = t.rank();
    if (upper < 0 || upper > r) throw std::invalid_argument("covariant: bad valence");
    const JetTensor& coef = horiz ? gamma_ : cartan_m_;
    const NumTensor cv = values(coef);
    const NumTensor gv = values(barthel_);

    CovDerivative out;
    out.values = NumTensor(n, r + 1);
    NumTensor part_d(n, r + 1), part_g(n, r + 1), part_up(n, r + 1), part_low(n, r + 1);
    if (keep_jets) out.jets = JetTensor(n, r + 1);
    const Jet zero(space_.get(), 0.0);

    for (std::size_t f = 0; f < t.size(); ++f) {
        std::vector<double> dyv(static_cast<std::size_t>(n));
        std::vector<Jet> dyj;
        for (int m = 0; m < n; ++m) dyv[static_cast<std::size_t>(m)] = t[f].partial(n + m);
        if (keep_jets && horiz)
            for (int m = 0; m < n; ++m) dyj.push_back(t[f].dy(m));

        for (int k = 0; k < n; ++k) {
            const std::size_t o = f * static_cast<std::size_t>(n) + static_cast<std::size_t>(k);
            Jet acc = zero;
            if (horiz) {
                part_d[o] = t[f].partial(k);
                double corr = 0.0;
                for (int m = 0; m < n; ++m) corr += gv(m, k) * dyv[static_cast<std::size_t>(m)];
                part_g[o] = -corr;
                if (keep_jets) {
                    acc = t[f].dx(k);
                    for (int m = 0; m < n; ++m) acc.fma(barthel_(m, k), dyj[static_cast<std::size_t>(m)], -1.0);
                }
            } else {
                part_d[o] = dyv[static_cast<std::size_t>(k)];
                if (keep_jets) acc = t[f].dy(k);
            }
            double up = 0.0;
            double low = 0.0;
            for (int p = 0; p < r; ++p) {
                const int i = t.index_at(f, p);
                for (int m = 0; m < n; ++m) {
                    const std::size_t fm = t.replace(f, p, m);
                    if (p < upper) {
                        up += t[fm].value() * cv(i, m, k);
                        if (keep_jets) acc.fma(t[fm], coef(i, m, k));
                    } else {
                        low -= t[fm].value() * cv(m, i, k);
                        if (keep_jets) acc.fma(t[fm], coef(m, i, k), -1.0);
                    }
                }
            }
            part_up[o] = up;
            part_low[o] = low;
            out.values[o] = part_d[o] + part_g[o] + up + low;
            if (keep_jets) out.jets[o] = std::move(acc);
        }
    }
    out.scale = frobenius(part_d) + frobenius(part_g) + frobenius(part_up) + frobenius(part_low);
    return out;
}

double GeometryFrame::scale(const std::string& key) const {
    auto it = scales.find(key);
    if (it == scales.end()) throw std::out_of_range("no scale recorded for " + key);
    return it->second;
}

GeometryFrame compute_frame(const MetricSpec& spec, const ChartPoint& point) {
    const FrameContext ctx(spec, point);
    return compute_frame(ctx);
}

namespace {

// X_hijk = g_il X^l_hjk
NumTensor lower_first(const NumTensor& g, const NumTensor& t) {
    const int n = t.dim();
    NumTensor out(n, 4);
    for (int h = 0; h < n; ++h)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l) s += g(i, l) * t(l, h, j, k);
                    out(h, i, j, k) = s;
                }
    return out;
}

}  // namespace

GeometryFrame compute_frame(const FrameContext& ctx) {
    const int n = ctx.dim();
    const auto& y = ctx.point().y;
    const JetSpace* sp = &ctx.space();
    GeometryFrame f;
    f.dim = n;
    f.point = ctx.point();
    f.energy = ctx.energy().value();
    f.length = ctx.length().value();
    const double L = f.length;

    f.g = values(ctx.metric());
    f.g_inv = values(ctx.inverse_metric());
    f.det_g = ctx.det_metric();
    f.scales["g"] = frobenius(f.g);

    f.cartan = values(ctx.cartan());
    f.cartan_mixed = values(ctx.cartan_mixed());
    f.scales["C"] = frobenius(f.cartan);
    f.cartan_trace = NumTensor(n, 1);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) f.cartan_trace(i) += f.cartan_mixed(k, i, k);
    f.cartan_trace_up = NumTensor(n, 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f.cartan_trace_up(i) += f.g_inv(i, j) * f.cartan_trace(j);
    for (int i = 0; i < n; ++i) f.cartan_sq += f.cartan_trace(i) * f.cartan_trace_up(i);

    f.ell = NumTensor(n, 1);
    f.ell_up = NumTensor(n, 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) f.ell(i) += f.g(i, j) * y[static_cast<std::size_t>(j)];
        f.ell(i) /= L;
        f.ell_up(i) = y[static_cast<std::size_t>(i)] / L;
    }
    f.angular = NumTensor(n, 2);
    f.phi = NumTensor(n, 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            f.angular(i, j) = f.g(i, j) - f.ell(i) * f.ell(j);
            f.phi(i, j) = (i == j ? 1.0 : 0.0) - f.ell_up(i) * f.ell(j);
        }

    f.spray = values(ctx.spray());
    f.barthel = values(ctx.barthel());
    f.berwald = values(ctx.berwald());
    f.berwald_dot = values(ctx.vertical(ctx.berwald()));
    f.connection = values(ctx.connection());
    f.scales["Gamma"] = frobenius(f.connection);

    // formal Christoffel symbols from plain x-derivatives of g
    f.christoffel = NumTensor(n, 3);
    {
        NumTensor dg(n, 3);  // dg(a, b, k) = d_k g_ab
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int k = 0; k < n; ++k) dg(a, b, k) = ctx.metric()(a, b).partial(k);
        for (int h = 0; h < n; ++h)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l)
                        s += 0.5 * f.g_inv(h, l) * (dg(l, j, i) + dg(i, l, j) - dg(i, j, l));
                    f.christoffel(h, i, j) = s;
                }
    }

    // (v)h-torsion R^i_jk = delta_k G^i_j - delta_j G^i_k
    const NumTensor gv = f.barthel;
    auto delta_values = [&](const JetTensor& t, double& scale) {
        NumTensor out(n, t.rank() + 1);
        NumTensor pd(n, t.rank() + 1), pg(n, t.rank() + 1);
        for (std::size_t q = 0; q < t.size(); ++q)
            for (int k = 0; k < n; ++k) {
                const std::size_t o = q * static_cast<std::size_t>(n) + static_cast<std::size_t>(k);
                pd[o] = t[q].partial(k);
                double c = 0.0;
                for (int m = 0; m < n; ++m) c += gv(m, k) * t[q].partial(n + m);
                pg[o] = -c;
                out[o] = pd[o] + pg[o];
            }
        scale = frobenius(pd) + frobenius(pg);
        return out;
    };
    double s_dbarthel = 0.0;
    const NumTensor dbarthel = delta_values(ctx.barthel(), s_dbarthel);  // (i, j, k) = delta_k G^i_j
    f.vh_torsion = NumTensor(n, 3);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) f.vh_torsion(i, j, k) = dbarthel(i, j, k) - dbarthel(i, k, j);
    f.scales["Rt"] = 2.0 * s_dbarthel;

    // h-curvature
    double s_dgamma = 0.0;
    const NumTensor dgamma = delta_values(ctx.connection(), s_dgamma);  // (i, h, j, k) = delta_k Gamma^i_hj
    const NumTensor& G = f.connection;
    const NumTensor& Cm = f.cartan_mixed;
    f.h_curv = NumTensor(n, 4);
    {
        NumTensor gg1(n, 4), gg2(n, 4), ct(n, 4);
        for (int i = 0; i < n; ++i)
            for (int h = 0; h < n; ++h)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        double a = 0.0, b = 0.0, c = 0.0;
                        for (int m = 0; m < n; ++m) {
                            a += G(m, h, j) * G(i, m, k);
                            b += G(m, h, k) * G(i, m, j);
                            c += Cm(i, h, m) * f.vh_torsion(m, j, k);
                        }
                        gg1(i, h, j, k) = a;
                        gg2(i, h, j, k) = b;
                        ct(i, h, j, k) = c;
                        f.h_curv(i, h, j, k) = CurvatureConvention::kCurvatureSign *
                                               (dgamma(i, h, j, k) - dgamma(i, h, k, j) + a - b - c);
                    }
        f.scales["R"] = 2.0 * s_dgamma + frobenius(gg1) + frobenius(gg2) + frobenius(ct);
    }

    // C^h_ij|k, landsberg tensor, hv-curvature
    const CovDerivative cm_h = ctx.h_cov(ctx.cartan_mixed(), 1);
    f.cartan_mixed_h = cm_h.values;
    f.scales["C^|"] = cm_h.scale;
    f.hv_torsion = contract_last(f.cartan_mixed_h, y);
    double ynorm = 0.0;
    for (double v : y) ynorm += v * v;
    f.scales["Phat"] = cm_h.scale * std::sqrt(ynorm);
    {
        const NumTensor vgamma = values(ctx.vertical(ctx.connection()));  // (i, h, j, k) = dy_k Gamma^i_hj
        f.hv_curv = NumTensor(n, 4);
        NumTensor t2(n, 4), t3(n, 4);
        for (int i = 0; i < n; ++i)
            for (int h = 0; h < n; ++h)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        double c = 0.0;
                        for (int m = 0; m < n; ++m) c += Cm(i, h, m) * f.hv_torsion(m, j, k);
                        t2(i, h, j, k) = -f.cartan_mixed_h(i, h, k, j);
                        t3(i, h, j, k) = c;
                        f.hv_curv(i, h, j, k) = vgamma(i, h, j, k) + t2(i, h, j, k) + c;
                    }
        f.scales["P"] = frobenius(vgamma) + cm_h.scale + frobenius(t3);
    }

    // v-curvature
    f.v_curv = NumTensor(n, 4);
    {
        NumTensor a(n, 4), b(n, 4);
        for (int i = 0; i < n; ++i)
            for (int h = 0; h < n; ++h)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        double p = 0.0, q = 0.0;
                        for (int m = 0; m < n; ++m) {
                            p += Cm(m, h, k) * Cm(i, m, j);
                            q += Cm(m, h, j) * Cm(i, m, k);
                        }
                        a(i, h, j, k) = p;
                        b(i, h, j, k) = q;
                        f.v_curv(i, h, j, k) = p - q;
                    }
        f.scales["S"] = frobenius(a) + frobenius(b);
    }

    f.h_curv_low = lower_first(f.g, f.h_curv);
    f.hv_curv_low = lower_first(f.g, f.hv_curv);
    f.v_curv_low = lower_first(f.g, f.v_curv);

    f.ricci_h = NumTensor(n, 2);
    f.ricci_v = NumTensor(n, 2);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int m = 0; m < n; ++m) {
                f.ricci_h(a, b) += f.h_curv(m, b, a, m);
                f.ricci_v(a, b) += f.v_curv(m, b, a, m);
            }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            f.scalar_h += f.g_inv(a, b) * f.ricci_h(a, b);
            f.scalar_v += f.g_inv(a, b) * f.ricci_v(a, b);
        }

    // derivative stores
    const CovDerivative c_h = ctx.h_cov(ctx.cartan(), 0);
    f.cartan_h = c_h.values;
    f.scales["C|"] = c_h.scale;
    f.scales["C|0"] = c_h.scale * std::sqrt(ynorm);
    const CovDerivative c_v = ctx.v_cov(ctx.cartan(), 0);
    f.cartan_v = c_v.values;
    f.scales["C||"] = c_v.scale;
    f.cartan_dot = values(ctx.vertical(ctx.cartan()));
    f.scales["Cdot"] = frobenius(f.cartan_dot);

    JetTensor trace(n, 1, Jet(sp, 0.0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) trace(i) += ctx.cartan_mixed()(k, i, k);
    const CovDerivative tr_h = ctx.h_cov(trace, 0);
    f.cartan_trace_h0 = contract_last(tr_h.values, y);
    f.scales["C_i|"] = tr_h.scale;
    f.scales["C_i|0"] = tr_h.scale * std::sqrt(ynorm);

    // lowered S on jets, for its covariant derivatives
    JetTensor s_low(n, 4);
    for (int h = 0; h < n; ++h)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    Jet acc(sp, 0.0);
                    for (int m = 0; m < n; ++m) {
                        acc.fma(ctx.cartan_mixed()(m, h, k), ctx.cartan()(i, m, j));
                        acc.fma(ctx.cartan_mixed()(m, h, j), ctx.cartan()(i, m, k), -1.0);
                    }
                    s_low(h, i, j, k) = std::move(acc);
                }
    const CovDerivative s_h = ctx.h_cov(s_low, 0);
    f.v_curv_h = s_h.values;
    f.v_curv_h0 = contract_last(s_h.values, y);
    f.scales["S|"] = s_h.scale;
    f.scales["S|0"] = s_h.scale * std::sqrt(ynorm);
    const CovDerivative s_v = ctx.v_cov(s_low, 0, true);
    f.v_curv_v = s_v.values;
    f.scales["S||"] = s_v.scale;
    const CovDerivative s_vv = ctx.v_cov(s_v.jets, 0);
    f.v_curv_vv = s_vv.values;
    f.scales["S||||"] = s_vv.scale;

    const CovDerivative g_h = ctx.h_cov(ctx.metric(), 0);
    f.metric_h = g_h.values;
    f.scales["g|"] = g_h.scale;
    const CovDerivative g_v = ctx.v_cov(ctx.metric(), 0);
    f.metric_v = g_v.values;
    f.scales["g||"] = g_v.scale;

    JetTensor len(n, 0);
    len[0] = ctx.length();
    const CovDerivative l_h = ctx.h_cov(len, 0);
    f.length_h = l_h.values;
    f.scales["L|"] = l_h.scale;

    JetTensor hbar(n, 2);
    {
        std::vector<Jet> ell;
        for (int i = 0; i < n; ++i) ell.push_back(ctx.length().dy(i));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) hbar(i, j) = ctx.metric()(i, j) - ell[static_cast<std::size_t>(i)] * ell[static_cast<std::size_t>(j)];
    }
    const CovDerivative hb_h = ctx.h_cov(hbar, 0);
    f.angular_h = hb_h.values;
    f.scales["hbar|"] = hb_h.scale;
    return f;
}

NumTensor apply_projection(const GeometryFrame& f, const NumTensor& t, int upper) {
    const int n = f.dim;
    if (t.rank() < 1 || upper < 0 || upper > 1 || t.dim() != n)
        throw std::invalid_argument("apply_projection: shape mismatch");
    NumTensor cur = t;
    for (int p = 0; p < t.rank(); ++p) {
        NumTensor next(n, t.rank());
        for (std::size_t q = 0; q < cur.size(); ++q) {
            const int i = cur.index_at(q, p);
            double s = 0.0;
            for (int c = 0; c < n; ++c)
                s += cur[cur.replace(q, p, c)] * (p < upper ? f.phi(i, c) : f.phi(c, i));
            next[q] = s;
        }
        cur = std::move(next);
    }
    return cur;
}

DerivedTensors derived_tensors(const GeometryFrame& f) {
    const int n = f.dim;
    if (n < 3) throw DimensionTooSmall("derived tensors need n >= 3 (division by n - 2)");
    const auto& y = f.point.y;
    const double L = f.length;
    DerivedTensors d;

    d.F = NumTensor(n, 2);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            d.F(a, b) = (f.ricci_h(a, b) - f.scalar_h * f.g(a, b) / (2.0 * (n - 1))) / (n - 2);
    d.scale_F = (frobenius(f.ricci_h) + std::abs(f.scalar_h) * frobenius(f.g) / (2.0 * (n - 1))) / (n - 2);
    d.r = f.scalar_h / (n - 1);

    d.F_op = NumTensor(n, 2);
    for (int i = 0; i < n; ++i)
        for (int x = 0; x < n; ++x)
            for (int l = 0; l < n; ++l) d.F_op(i, x) += f.g_inv(i, l) * d.F(x, l);

    d.Fa = NumTensor(n, 1);
    d.Fb = NumTensor(n, 1);
    for (int x = 0; x < n; ++x)
        for (int a = 0; a < n; ++a) {
            d.Fa(x) += y[static_cast<std::size_t>(a)] * d.F(a, x);
            d.Fb(x) += d.F(x, a) * y[static_cast<std::size_t>(a)];
        }
    d.m = apply_projection(f, d.F, 0);
    d.m_op = NumTensor(n, 2);
    for (int i = 0; i < n; ++i)
        for (int x = 0; x < n; ++x)
            for (int l = 0; l < n; ++l) d.m_op(i, x) += f.g_inv(i, l) * d.m(x, l);
    d.a = (1.0 / L) * apply_projection(f, d.Fa, 0);
    d.b = (1.0 / L) * apply_projection(f, d.Fb, 0);
    d.a_up = NumTensor(n, 1);
    d.b_up = NumTensor(n, 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            d.a_up(i) += f.g_inv(i, j) * d.a(j);
            d.b_up(i) += f.g_inv(i, j) * d.b(j);
        }
    for (int a = 0; a < n; ++a) d.c += d.Fa(a) * y[static_cast<std::size_t>(a)];
    d.c /= L * L;

    d.R_global = NumTensor(n, 4);
    for (int X = 0; X < n; ++X)
        for (int Y = 0; Y < n; ++Y)
            for (int Z = 0; Z < n; ++Z)
                for (int W = 0; W < n; ++W) d.R_global(X, Y, Z, W) = f.h_curv_low(Z, W, X, Y);

    d.R_hat = NumTensor(n, 3);
    for (int i = 0; i < n; ++i)
        for (int x = 0; x < n; ++x)
            for (int yy = 0; yy < n; ++yy)
                for (int h = 0; h < n; ++h) d.R_hat(i, x, yy) += y[static_cast<std::size_t>(h)] * f.h_curv(i, h, x, yy);
    d.H = NumTensor(n, 2);
    for (int i = 0; i < n; ++i)
        for (int x = 0; x < n; ++x)
            for (int j = 0; j < n; ++j) d.H(i, x) += y[static_cast<std::size_t>(j)] * d.R_hat(i, j, x);

    d.Psi = NumTensor(n, 4);
    const NumTensor& g = f.g;
    const NumTensor& ric = f.ricci_h;
    for (int X = 0; X < n; ++X)
        for (int Y = 0; Y < n; ++Y)
            for (int Z = 0; Z < n; ++Z)
                for (int W = 0; W < n; ++W) {
                    const double alt = g(X, Z) * ric(Y, W) + g(Y, W) * ric(X, Z) - d.r * g(X, Z) * g(Y, W) -
                                       (g(Y, Z) * ric(X, W) + g(X, W) * ric(Y, Z) - d.r * g(Y, Z) * g(X, W));
                    d.Psi(X, Y, Z, W) = d.R_global(X, Y, Z, W) - alt / (n - 2);
                }
    const double gn = frobenius(g);
    d.scale_Psi = frobenius(d.R_global) + (4.0 * gn * frobenius(ric) + 2.0 * std::abs(d.r) * gn * gn) / (n - 2);
    return d;
}

}  // namespace finsler
