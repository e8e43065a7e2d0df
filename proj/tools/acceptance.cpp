// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>

#include "finsler/cli.hpp"
#include "finsler/identities.hpp"
#include "finsler/jet.hpp"

using namespace finsler;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kPoints = 10;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
    std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

const PredicateResult& at(const std::vector<PredicateResult>& rs, const std::string& name) {
    return rs[static_cast<std::size_t>(predicate_id(name) - 1)];
}

struct FixtureRun {
    MetricSpec spec;
    std::vector<ChartPoint> points;
    IdentityReport suite;
};

}  // namespace

int main() {
    const auto t_all = Clock::now();
    const ToleranceConfig tol;

    // 1. jets vs finite differences
    {
        const auto t0 = Clock::now();
        double worst = 0.0;
        std::size_t checked = 0;
        for (const auto& fx : builtin_fixtures()) {
            const auto [spec, dom] = load_metric(fx.name);
            const Expr e = spec.energy_expr();
            for (const auto& p : sample_points(spec, dom, kPoints)) {
                const auto t = jet_eval(e, p, {2, 3});
                for (std::size_t k = 0; k < t.indices().size(); ++k) {
                    const double jet = t.values()[k];
                    const double fd = fd_derivative(e, p, t.indices()[k]);
                    worst = std::max(worst, std::abs(fd - jet) / std::max(1.0, std::abs(jet)));
                    ++checked;
                }
            }
        }
        const double secs = seconds_since(t0);
        report(1, worst <= 1e-4 && secs < 10.0, "oracle equivalence",
               std::to_string(checked) + " partials, worst rel " + fmt("%.2e", worst) + ", " + fmt("%.2f s", secs));
    }

    std::map<std::string, FixtureRun> runs;
    for (const auto& fx : builtin_fixtures()) {
        auto [spec, dom] = load_metric(fx.name);
        auto pts = sample_points(spec, dom, kPoints);
        auto suite = run_identity_suite(spec, pts, tol);
        runs.emplace(fx.name, FixtureRun{std::move(spec), std::move(pts), std::move(suite)});
    }

    // 2. flatness
    {
        const auto& r = runs.at("euclidean-n2");
        double worst = 0.0;
        for (const auto& f : compute_frames(r.spec, r.points))
            for (const NumTensor* t : {&f.cartan, &f.h_curv, &f.hv_curv, &f.v_curv, &f.connection})
                worst = std::max(worst, max_abs(*t));
        report(2, worst <= 1e-12, "flatness of euclidean-n2", "max |C|,|R|,|P|,|S|,|Gamma| = " + fmt("%.2e", worst));
    }

    // 3. sphere / hyperbolic isotropy constant
    {
        bool ok = true;
        std::string detail;
        for (auto [name, k] : {std::pair{"sphere-n2", 1.0}, std::pair{"hyperbolic-n2", -1.0}}) {
            double dev = 0.0;
            for (const auto& pt : runs.at(name).suite.classification.per_point) {
                const auto& r = at(pt, "h-isotropic");
                ok = ok && r.verdict == Verdict::holds;
                dev = std::max(dev, std::abs(r.params.at("k0")[0] - k));
            }
            ok = ok && dev <= 1e-6;
            detail += std::string(name) + " |k0 - " + fmt("%+.0f", k) + "| <= " + fmt("%.2e", dev) + "  ";
        }
        report(3, ok, "isotropy constant", detail);
    }

    // 4. P1..P8
    {
        int holds = 0, bad = 0;
        double worst = 0.0;
        for (const auto& [name, r] : runs)
            for (const auto& id : r.suite.results) {
                if (id.group.size() != 2 || id.group[0] != 'P') continue;
                if (id.verdict == Verdict::holds) ++holds;
                else ++bad;
                if (id.scale > 0.0) worst = std::max(worst, id.residual / (id.tolerance * id.scale));
            }
        report(4, bad == 0, "cartan identities P1-P8",
               std::to_string(holds) + " hold, " + std::to_string(bad) + " not holding, worst residual/(tol*scale) " +
                   fmt("%.2e", worst));
    }

    // 5. C-reducible chain on randers-n3
    {
        const auto& r = runs.at("randers-n3");
        bool ok = true;
        double worst = 0.0;
        for (const auto& pt : r.suite.classification.per_point)
            for (const char* name : {"berwald", "landsberg", "general-landsberg", "c-reducible", "p-reducible"}) {
                const auto& p = at(pt, name);
                ok = ok && p.verdict == Verdict::holds && p.residual <= 1e-7 * p.scale;
                worst = std::max(worst, p.scale > 0 ? p.residual / p.scale : p.residual);
            }
        double dev = 0.0;
        int ratios = 0;
        for (const auto* id : r.suite.group("ID2")) {
            ok = ok && id->verdict == Verdict::holds;
            if (id->params.count("ratio")) {
                dev = std::max(dev, std::abs(id->params.at("ratio")[0] + 0.25));
                ++ratios;
            }
        }
        ok = ok && ratios == kPoints && dev <= 1e-7;
        report(5, ok, "C-reducible chain on randers-n3",
               "worst residual/scale " + fmt("%.2e", worst) + ", |Sc^v/C^2 + 1/4| <= " + fmt("%.2e", dev));
    }

    // 6. Minkowski fixture
    {
        const auto& r = runs.at("quartic-minkowski-n3");
        bool ok = true;
        double worst = 0.0, min_c = INFINITY;
        for (const auto& pt : r.suite.classification.per_point) {
            for (const char* name : {"locally-minkowskian", "berwald"}) {
                const auto& p = at(pt, name);
                ok = ok && p.residual <= 1e-9 * p.scale;
                worst = std::max(worst, p.scale > 0 ? p.residual / p.scale : p.residual);
            }
            ok = ok && at(pt, "riemannian").verdict == Verdict::fails;
        }
        for (const auto& f : compute_frames(r.spec, r.points)) min_c = std::min(min_c, frobenius(f.cartan));
        ok = ok && min_c >= 1e-2;
        report(6, ok, "quartic-minkowski-n3",
               "worst residual/scale " + fmt("%.2e", worst) + ", riemannian fails, min |C| " + fmt("%.3f", min_c));
    }

    // 7. S^v-recurrence collapse
    {
        int agree = 0, disagree = 0;
        for (const auto& [name, r] : runs)
            for (const auto* id : r.suite.group("ID4")) (id->verdict == Verdict::holds ? agree : disagree)++;
        report(7, disagree == 0, "S^v-recurrent iff S = 0",
               std::to_string(agree) + " agreements, " + std::to_string(disagree) + " exceptions");
    }

    // 8. P-symmetry iff S|0 = 0
    {
        int agree = 0, disagree = 0;
        double min_p = INFINITY, min_s = INFINITY;
        for (const auto& [name, r] : runs)
            for (const auto* id : r.suite.group("ID3")) {
                (id->verdict == Verdict::holds ? agree : disagree)++;
                if (name == "quartic-perturbed-n3") {
                    min_p = std::min(min_p, id->params.at("p_symmetry_ratio")[0]);
                    min_s = std::min(min_s, id->params.at("s_h0_ratio")[0]);
                }
            }
        const double t = tol.get("p-symmetric");
        const bool nonzero = min_p > t && min_s > t;
        report(8, disagree == 0 && nonzero, "P-symmetric iff S|0 = 0",
               std::to_string(agree) + " agreements, " + std::to_string(disagree) + " disagreements; perturbed quartic min ratios " +
                   fmt("%.2e", min_p) + " / " + fmt("%.2e", min_s));
    }

    // 9. synthetic recovery
    {
        bool ok = true;
        double plant = 0.0, rank_one = 0.0;
        for (const auto& r : synthetic_algebra_tests(7, 100)) {
            ok = ok && r.verdict == Verdict::holds;
            if (r.name.rfind("planted", 0) == 0) plant = std::max(plant, r.residual);
            if (r.name.rfind("rank-one", 0) == 0) rank_one = std::max(rank_one, r.residual);
        }
        const auto p = planted_semi_c_reducible(4, 0.3, 7);
        const double ex = std::max(std::abs(p.fitted_mu - 0.3), std::abs(p.fitted_tau - 0.7));
        ok = ok && plant <= 1e-12 && rank_one <= 1e-14 && ex <= 1e-12;
        report(9, ok, "synthetic recovery",
               "300 trials, worst (mu,tau) error " + fmt("%.2e", plant) + ", rank-one max|S|/scale " + fmt("%.2e", rank_one) +
                   ", planted (0.3, 0.7) error " + fmt("%.2e", ex));
    }

    // 10. implication lattice
    {
        std::size_t violations = 0, checked = 0;
        for (const auto& [name, r] : runs) {
            violations += r.suite.classification.violations.size();
            checked += r.suite.classification.per_point.size();
            for (const auto* id : r.suite.group("ID7")) violations += id->verdict == Verdict::fails;
            for (const auto* id : r.suite.group("ID6")) violations += id->verdict == Verdict::fails;
        }
        report(10, violations == 0, "implication lattice",
               std::to_string(checked) + " fixture points, " + std::to_string(violations) + " violations");
    }

    // 11. determinism of classify --seed 42
    {
        bool ok = true;
        for (const auto& fx : builtin_fixtures()) {
            RunConfig cfg;
            cfg.command = Command::classify;
            cfg.spec = fx.name;
            cfg.seed = 42;
            std::ostringstream a, b, err;
            const int ca = run(cfg, a, err), cb = run(cfg, b, err);
            ok = ok && ca == 0 && cb == 0 && a.str() == b.str() && !a.str().empty();
        }
        report(11, ok, "deterministic JSON", "two classify --seed 42 runs per fixture compared byte for byte");
    }

    const double total = seconds_since(t_all);
    std::printf("total %.2f s (target < 60 s)\n", total);
    std::printf("%s\n", failures == 0 ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
    return failures == 0 ? 0 : 1;
}
