#include <gtest/gtest.h>

#include <cmath>

#include "finsler/identities.hpp"

using namespace finsler;

namespace {

IdentityReport suite(const std::string& name, int count = 10) {
    auto [spec, dom] = load_metric(name);
    return run_identity_suite(spec, sample_points(spec, dom, count), ToleranceConfig{});
}

}  // namespace

TEST(Identities, AllFixturesPass) {
    for (const auto& fx : builtin_fixtures()) {
        const auto rep = suite(fx.name);
        EXPECT_TRUE(rep.passed()) << fx.name;
        for (const auto& r : rep.results)
            EXPECT_NE(r.verdict, Verdict::fails) << fx.name << " " << r.group << " " << r.name << " point " << r.point;
    }
}

TEST(Identities, EuclideanConditionalsAreVacuous) {
    const auto rep = suite("euclidean-n2", 4);
    for (const auto& r : rep.results) {
        if (r.group.rfind("P", 0) == 0) {
            EXPECT_EQ(r.verdict, Verdict::holds) << r.name;
        }
    }
    for (const char* g : {"ID2", "ID5", "ID6", "ID7", "ID8"})
        for (const auto* r : rep.group(g)) EXPECT_EQ(r->verdict, Verdict::not_applicable) << g << " " << r->name;
}

TEST(Identities, RandersVerticalScalarCurvatureRatio) {
    const auto rep = suite("randers-n3");
    int seen = 0;
    for (const auto* r : rep.group("ID2")) {
        ASSERT_EQ(r->verdict, Verdict::holds) << r->name;
        if (r->params.count("ratio")) {
            EXPECT_NEAR(r->params.at("ratio")[0], -0.25, 1e-7);
            ++seen;
        }
    }
    EXPECT_EQ(seen, 10);
}

TEST(Identities, SphereSymmetryEquivalenceIsTrivial) {
    const auto rep = suite("sphere-n2", 4);
    for (const auto* r : rep.group("ID3")) {
        EXPECT_EQ(r->verdict, Verdict::holds);
        EXPECT_EQ(r->params.at("p_symmetry_ratio")[0], 0.0);
        EXPECT_EQ(r->params.at("s_h0_ratio")[0], 0.0);
    }
}

TEST(Identities, PerturbedQuarticSymmetryEquivalenceWithNonzeroResiduals) {
    const auto rep = suite("quartic-perturbed-n3");
    for (const auto* r : rep.group("ID3")) {
        EXPECT_EQ(r->verdict, Verdict::holds);
        EXPECT_GT(r->params.at("p_symmetry_ratio")[0], 1e-6);
        EXPECT_GT(r->params.at("s_h0_ratio")[0], 1e-6);
    }
}

TEST(Identities, VerticalRecurrenceCollapse) {
    for (const auto& fx : builtin_fixtures()) {
        const auto rep = suite(fx.name, 5);
        for (const auto* r : rep.group("ID4")) EXPECT_EQ(r->verdict, Verdict::holds) << fx.name;
    }
}

TEST(Identities, R3ChainFiresOnFourSphere) {
    const auto rep = suite("sphere-n4", 4);
    for (const char* g : {"ID5", "ID8"})
        for (const auto* r : rep.group(g)) EXPECT_EQ(r->verdict, Verdict::holds) << g << " " << r->name;
    int fired = 0;
    for (const auto* r : rep.group("ID6")) fired += r->verdict == Verdict::holds;
    EXPECT_EQ(fired, 8);
}

TEST(Identities, ToleranceOverride) {
    ToleranceConfig tol;
    EXPECT_DOUBLE_EQ(identity_tolerance("P5", tol), 1e-8);
    EXPECT_DOUBLE_EQ(identity_tolerance("P1", tol), 1e-9);
    tol.set("P5=1e-6");
    EXPECT_DOUBLE_EQ(identity_tolerance("P5", tol), 1e-6);
}

TEST(Identities, Deterministic) {
    const auto a = suite("randers-curved-n3", 3);
    const auto b = suite("randers-curved-n3", 3);
    ASSERT_EQ(a.results.size(), b.results.size());
    for (std::size_t i = 0; i < a.results.size(); ++i) EXPECT_EQ(a.results[i].residual, b.results[i].residual);
}

TEST(Synthetic, PlantedRecovery) {
    const auto r = planted_semi_c_reducible(4, 0.3, 7);
    EXPECT_NEAR(r.fitted_mu, 0.3, 1e-12);
    EXPECT_NEAR(r.fitted_tau, 0.7, 1e-12);
}

TEST(Synthetic, AllTrialsPass) {
    const auto rs = synthetic_algebra_tests(7, 100);
    EXPECT_EQ(rs.size(), 12u);
    for (const auto& r : rs) {
        EXPECT_EQ(r.verdict, Verdict::holds) << r.name;
        if (r.name.rfind("zero C", 0) == 0) EXPECT_EQ(r.residual, 0.0);
    }
}
