#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "finsler/classifier.hpp"

namespace finsler {

struct IdentityResult {
    std::string group;      // P1..P8, ID2..ID8, lattice, synthetic
    std::string name;
    std::string statement;  // what is being checked, in words
    double residual = 0.0;
    double scale = 0.0;
    double tolerance = 0.0;
    Verdict verdict = Verdict::not_applicable;
    std::string condition;  // applicability note for conditional identities
    long point = -1;        // sample index, -1 for point-free checks
    std::map<std::string, std::vector<double>> params;
};

struct IdentityReport {
    std::string metric;
    int dim = 0;
    std::vector<ChartPoint> points;
    ClassificationReport classification;
    std::vector<IdentityResult> results;

    bool passed() const;
    std::vector<const IdentityResult*> group(const std::string& g) const;
};

/// Built-in tolerance of an identity group (P1 1e-9, P5 1e-8, ...), before config overrides.
double identity_tolerance(const std::string& group, const ToleranceConfig& tol);

/// P1..P8 at one point. `scaled` holds frames at (x, lambda y) for lambda = 0.5 and 2.
std::vector<IdentityResult> cartan_identities(const GeometryFrame& frame, const GeometryFrame& half,
                                              const GeometryFrame& twice, const ToleranceConfig& tol);

IdentityReport run_identity_suite(const MetricSpec& spec, const std::vector<ChartPoint>& points,
                                  const ToleranceConfig& tol);

/// Algebraic checks on random admissible Cartan tensors; `trials` per dimension n = 3, 4, 5.
std::vector<IdentityResult> synthetic_algebra_tests(std::uint64_t seed, int trials = 100);

/// One planted semi-C-reducible recovery, exposed for tests.
struct PlantedRecovery {
    double mu = 0.0, tau = 0.0;
    double fitted_mu = 0.0, fitted_tau = 0.0;
};
PlantedRecovery planted_semi_c_reducible(int dim, double mu, std::uint64_t seed);

}  // namespace finsler
