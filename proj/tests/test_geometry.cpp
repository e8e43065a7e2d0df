#include <gtest/gtest.h>

#include <cmath>

#include "finsler/errors.hpp"
#include "finsler/geometry.hpp"

using namespace finsler;

namespace {

std::vector<ChartPoint> points(const std::string& name, int count = 4) {
    auto [spec, dom] = load_metric(name);
    return sample_points(spec, dom, count);
}

MetricSpec spec_of(const std::string& name) { return load_metric(name).first; }

}  // namespace

TEST(Geometry, EuclideanEverythingVanishes) {
    const auto spec = spec_of("euclidean-n2");
    for (const auto& p : points("euclidean-n2")) {
        const auto f = compute_frame(spec, p);
        EXPECT_EQ(max_abs(f.cartan), 0.0);
        EXPECT_EQ(max_abs(f.connection), 0.0);
        EXPECT_EQ(max_abs(f.h_curv), 0.0);
        EXPECT_EQ(max_abs(f.hv_curv), 0.0);
        EXPECT_EQ(max_abs(f.v_curv), 0.0);
        EXPECT_NEAR(f.g(0, 0), 1.0, 1e-15);
        EXPECT_NEAR(f.g(0, 1), 0.0, 1e-15);
    }
}

TEST(Geometry, SphereCurvature) {
    const auto spec = spec_of("sphere-n2");
    const ChartPoint p{{0.7, 0.3}, {1.0, 2.0}};
    const auto f = compute_frame(spec, p);
    const double s2 = std::sin(0.7) * std::sin(0.7);
    EXPECT_NEAR(f.h_curv_low(0, 1, 0, 1), s2, 1e-12);
    EXPECT_NEAR(f.h_curv_low(0, 1, 1, 0), -s2, 1e-12);
    EXPECT_NEAR(f.scalar_h, 2.0, 1e-12);
    // R_hijk = k0 (g_hj g_ik - g_hk g_ij) with k0 = +1
    const auto& g = f.g;
    for (int h = 0; h < 2; ++h)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    EXPECT_NEAR(f.h_curv_low(h, i, j, k), g(h, j) * g(i, k) - g(h, k) * g(i, j), 1e-12);
}

TEST(Geometry, HyperbolicScalarCurvature) {
    const auto spec = spec_of("hyperbolic-n2");
    for (const auto& p : points("hyperbolic-n2")) EXPECT_NEAR(compute_frame(spec, p).scalar_h, -2.0, 1e-11);
}

TEST(Geometry, MinkowskiFlatButNotRiemannian) {
    const auto spec = spec_of("quartic-minkowski-n3");
    for (const auto& p : points("quartic-minkowski-n3")) {
        const auto f = compute_frame(spec, p);
        EXPECT_GT(frobenius(f.cartan), 1e-3);
        EXPECT_LT(max_abs(f.h_curv), 1e-13);
        EXPECT_LT(max_abs(f.cartan_h), 1e-13);
        EXPECT_LT(max_abs(f.hv_curv), 1e-13);
    }
}

TEST(Geometry, CurvatureMatchesSprayRiemann) {
    for (const char* name : {"sphere-n2", "randers-curved-n3", "quartic-perturbed-n3"}) {
        const auto spec = spec_of(name);
        for (const auto& p : points(name, 3)) {
            const FrameContext ctx(spec, p);
            const auto f = compute_frame(ctx);
            const int n = f.dim;
            const auto& G = ctx.spray();
            NumTensor spray_r(n, 2), contracted(n, 2);
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) {
                    double s = 2.0 * G(i).partial(k);
                    for (int j = 0; j < n; ++j) {
                        s -= p.y[j] * G(i).dy(k).partial(j);
                        s += 2.0 * G(j).value() * G(i).dy(j).partial(n + k);
                        s -= G(i).partial(n + j) * G(j).partial(n + k);
                    }
                    spray_r(i, k) = s;
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b) contracted(i, k) += p.y[a] * f.h_curv(i, a, b, k) * p.y[b];
                }
            EXPECT_LT(distance(spray_r, contracted), 1e-10 * (1.0 + frobenius(spray_r))) << name;
        }
    }
}

TEST(Geometry, CovariantDerivativeExamples) {
    const auto spec = spec_of("randers-curved-n3");
    for (const auto& p : points("randers-curved-n3", 3)) {
        const FrameContext ctx(spec, p);
        const int n = ctx.dim();
        const auto gh = ctx.h_cov(ctx.metric(), 0);
        EXPECT_LT(max_abs(gh.values), 1e-9 * gh.scale);
        const auto gv = ctx.v_cov(ctx.metric(), 0);
        EXPECT_LT(max_abs(gv.values), 1e-10 * gv.scale);

        JetTensor len(n, 0);
        len[0] = ctx.length();
        EXPECT_LT(max_abs(ctx.h_cov(len, 0).values), 1e-12);

        JetTensor kron(n, 2);
        JetTensor yv(n, 1);
        for (int i = 0; i < n; ++i) {
            yv(i) = ctx.y(i);
            for (int j = 0; j < n; ++j) kron(i, j) = ctx.constant(i == j ? 1.0 : 0.0);
        }
        EXPECT_EQ(max_abs(ctx.h_cov(kron, 1).values), 0.0);
        const auto yd = ctx.v_cov(yv, 1);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) EXPECT_NEAR(yd.values(i, k), i == k ? 1.0 : 0.0, 1e-13);
    }
}

TEST(Geometry, RandersCartanVDerivativeTotallySymmetric) {
    const auto spec = spec_of("randers-n3");
    for (const auto& p : points("randers-n3", 3)) {
        const auto f = compute_frame(spec, p);
        const double tol = 1e-10 * f.scale("C||");
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) EXPECT_NEAR(f.cartan_v(i, j, k, l), f.cartan_v(l, j, k, i), tol);
    }
}

TEST(Geometry, Projection) {
    const auto spec = spec_of("randers-n3");
    for (const auto& p : points("randers-n3", 3)) {
        const auto f = compute_frame(spec, p);
        EXPECT_LT(distance(apply_projection(f, f.g, 0), f.angular), 1e-13);
        const auto pc = apply_projection(f, f.cartan, 0);
        EXPECT_LT(distance(pc, f.cartan), 1e-12 * frobenius(f.cartan));
        const auto pp = apply_projection(f, f.cartan_h, 0);
        EXPECT_LT(distance(apply_projection(f, pp, 0), pp), 1e-12 * (1.0 + frobenius(pp)));
    }
}

TEST(Geometry, DerivedTensors) {
    EXPECT_THROW(derived_tensors(compute_frame(spec_of("sphere-n2"), points("sphere-n2", 1)[0])), DimensionTooSmall);

    const auto flat = parse_metric("dim 3; L = sqrt(y1^2 + y2^2 + y3^2)");
    const auto d0 = derived_tensors(compute_frame(flat, {{0.1, 0.2, 0.3}, {1.0, 0.5, -0.2}}));
    EXPECT_EQ(max_abs(d0.F), 0.0);
    EXPECT_EQ(max_abs(d0.Psi), 0.0);
    EXPECT_EQ(max_abs(d0.H), 0.0);
    EXPECT_EQ(d0.c, 0.0);

    const auto spec = spec_of("randers-curved-n3");
    for (const auto& p : points("randers-curved-n3", 3)) {
        const auto f = compute_frame(spec, p);
        const auto d = derived_tensors(f);
        const double tol = 1e-12 * (1.0 + d.scale_F);
        for (int i = 0; i < 3; ++i) {
            double hy = 0.0;
            for (int x = 0; x < 3; ++x) hy += d.H(i, x) * p.y[x];
            EXPECT_NEAR(hy, 0.0, 1e-12 * (1.0 + frobenius(d.H)));
            for (int j = 0; j < 3; ++j) {
                const double rebuilt = d.m(i, j) + f.ell(i) * d.a(j) + f.ell(j) * d.b(i) + d.c * f.ell(i) * f.ell(j);
                EXPECT_NEAR(d.F(i, j), rebuilt, tol);
            }
        }
    }
}

TEST(Geometry, DegenerateMetricRejected) {
    const auto spec = parse_metric("dim 2; riemannian; a11 = 1; a22 = x1^2");
    EXPECT_THROW(compute_frame(spec, {{0.0, 0.0}, {1.0, 1.0}}), DegenerateMetric);
}
