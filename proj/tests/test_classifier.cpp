#include <gtest/gtest.h>

#include <cmath>

#include "finsler/classifier.hpp"
#include "finsler/errors.hpp"

using namespace finsler;

namespace {

ClassificationReport classify(const std::string& name, int count = 10, const ToleranceConfig& tol = {}) {
    auto [spec, dom] = load_metric(name);
    return classify_manifold(spec, dom, count, tol);
}

const PredicateResult& at(const std::vector<PredicateResult>& rs, const std::string& name) {
    return rs[static_cast<std::size_t>(predicate_id(name) - 1)];
}

}  // namespace

TEST(Classifier, PredicateNames) {
    ASSERT_EQ(predicate_names().size(), 26u);
    EXPECT_EQ(predicate_id("riemannian"), 1);
    EXPECT_EQ(predicate_id("s-ps"), 26);
    EXPECT_EQ(predicate_id("nonsense"), 0);
}

TEST(Classifier, EuclideanIsRiemannianAndFlat) {
    const auto rep = classify("euclidean-n2");
    EXPECT_EQ(rep.find("riemannian").verdict, Verdict::holds);
    EXPECT_EQ(rep.find("locally-minkowskian").verdict, Verdict::holds);
    EXPECT_EQ(rep.find("berwald").verdict, Verdict::holds);
    EXPECT_EQ(rep.find("c-reducible").verdict, Verdict::not_applicable);
    EXPECT_TRUE(rep.violations.empty());
}

TEST(Classifier, SphereAndHyperbolicIsotropy) {
    for (auto [name, k] : {std::pair{"sphere-n2", 1.0}, std::pair{"hyperbolic-n2", -1.0}}) {
        const auto rep = classify(name);
        EXPECT_EQ(rep.find("h-isotropic").verdict, Verdict::holds) << name;
        EXPECT_EQ(rep.find("constant-curvature").verdict, Verdict::holds) << name;
        for (const auto& pt : rep.per_point) EXPECT_NEAR(at(pt, "h-isotropic").params.at("k0")[0], k, 1e-6) << name;
    }
}

TEST(Classifier, RandersChain) {
    const auto rep = classify("randers-n3");
    for (const char* name : {"berwald", "landsberg", "general-landsberg", "c-reducible", "p-reducible"}) {
        EXPECT_EQ(rep.find(name).verdict, Verdict::holds) << name;
        EXPECT_LE(rep.find(name).worst_ratio, 1.0) << name;
    }
    EXPECT_EQ(rep.find("riemannian").verdict, Verdict::fails);
    EXPECT_TRUE(rep.violations.empty());
}

TEST(Classifier, MinkowskiFixture) {
    ToleranceConfig tight;
    tight.set("locally-minkowskian=1e-9");
    tight.set("berwald=1e-9");
    const auto rep = classify("quartic-minkowski-n3", 10, tight);
    EXPECT_EQ(rep.find("locally-minkowskian").verdict, Verdict::holds);
    EXPECT_EQ(rep.find("berwald").verdict, Verdict::holds);
    EXPECT_EQ(rep.find("riemannian").verdict, Verdict::fails);
    for (const auto& pt : rep.per_point) EXPECT_GE(at(pt, "riemannian").residual, 1e-2);
}

TEST(Classifier, PerturbedQuarticFailsBerwald) {
    const auto rep = classify("quartic-perturbed-n3");
    EXPECT_EQ(rep.find("berwald").verdict, Verdict::fails);
    EXPECT_EQ(rep.find("landsberg").verdict, Verdict::fails);
    EXPECT_EQ(rep.find("p-symmetric").verdict, Verdict::fails);
}

TEST(Classifier, NoLatticeViolationsOnAnyFixture) {
    for (const auto& fx : builtin_fixtures()) EXPECT_TRUE(classify(fx.name).violations.empty()) << fx.name;
}

TEST(Classifier, LatticeDetectsContradiction) {
    std::vector<PredicateResult> rs(predicate_names().size());
    for (std::size_t i = 0; i < rs.size(); ++i) rs[i].name = predicate_names()[i];
    rs[static_cast<std::size_t>(predicate_id("berwald") - 1)].verdict = Verdict::holds;
    rs[static_cast<std::size_t>(predicate_id("landsberg") - 1)].verdict = Verdict::fails;
    const auto v = check_implications(rs, 3);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].stronger, "berwald");
    EXPECT_EQ(v[0].weaker, "landsberg");
    EXPECT_EQ(v[0].point, 3u);
}

TEST(Classifier, VerdictsInvariantUnderYScaling) {
    auto [spec, dom] = load_metric("randers-curved-n3");
    const auto pts = sample_points(spec, dom, 4);
    ToleranceConfig tol;
    for (double lambda : {0.5, 2.0}) {
        auto scaled = pts;
        for (auto& p : scaled)
            for (double& v : p.y) v *= lambda;
        const auto a = classify_frames(spec, compute_frames(spec, pts), tol);
        const auto b = classify_frames(spec, compute_frames(spec, scaled), tol);
        for (std::size_t p = 0; p < pts.size(); ++p)
            for (std::size_t q = 0; q < a.per_point[p].size(); ++q)
                EXPECT_EQ(a.per_point[p][q].verdict, b.per_point[p][q].verdict) << a.per_point[p][q].name;
    }
}

TEST(Classifier, ConstantCurvatureSpreadCheck) {
    const auto rep = classify("sphere-n2");
    EXPECT_EQ(rep.find("constant-curvature").note, "k constant across points");
    bool found = false;
    for (const auto& s : rep.spreads)
        if (s.predicate == "constant-curvature" && s.param == "k") {
            found = true;
            EXPECT_LE(s.spread[0], 1e-6 * (1.0 + std::abs(s.mean[0])));
        }
    EXPECT_TRUE(found);
}

TEST(Classifier, ShapeNotApplicableWhenCartanVanishes) {
    const auto rep = classify("sphere-n2", 3);
    for (const char* name : {"semi-c-reducible", "c-reducible", "c2-like", "quasi-c-reducible", "p2-like"})
        EXPECT_EQ(rep.find(name).verdict, Verdict::not_applicable) << name;
}

TEST(Tolerance, ParsingAndOverrides) {
    ToleranceConfig tol;
    tol.merge_text("# comment\nberwald = 1e-9\n\ndefault = 1e-6  # trailing\nP5 = 2e-8\n");
    EXPECT_DOUBLE_EQ(tol.get("berwald"), 1e-9);
    EXPECT_DOUBLE_EQ(tol.get("landsberg"), 1e-6);
    EXPECT_DOUBLE_EQ(tol.get_or("P5", 1.0), 2e-8);
    EXPECT_DOUBLE_EQ(tol.get_or("P6", 1.0), 1.0);
    tol.set("berwald=3e-9");
    EXPECT_DOUBLE_EQ(tol.get("berwald"), 3e-9);
    EXPECT_THROW(tol.set("nonsense=1e-3"), InputError);
    EXPECT_THROW(tol.set("berwald"), InputError);
    EXPECT_THROW(tol.set("berwald=abc"), InputError);
    EXPECT_THROW(tol.merge_text("berwald = -1\n"), InputError);
}

TEST(Classifier, SemiReducibleFitReportsMu) {
    const auto rep = classify("randers-n3", 3);
    for (const auto& pt : rep.per_point) {
        const auto& r = at(pt, "semi-c-reducible");
        EXPECT_EQ(r.verdict, Verdict::holds);
        EXPECT_NEAR(r.params.at("mu")[0], 1.0, 1e-7);
    }
}
