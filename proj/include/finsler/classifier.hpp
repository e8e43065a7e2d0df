#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "finsler/geometry.hpp"

namespace finsler {

enum class Verdict { holds, fails, not_applicable };

const char* verdict_name(Verdict v);

struct PredicateResult {
    int id = 0;
    std::string name;
    double residual = 0.0;
    double scale = 0.0;
    double tolerance = 0.0;
    std::map<std::string, std::vector<double>> params;
    Verdict verdict = Verdict::not_applicable;
    std::string note;
};

/// Relative tolerance per predicate, keyed by predicate name.
class ToleranceConfig {
public:
    double default_tolerance = 1e-7;
    std::map<std::string, double> overrides;

    double get(const std::string& name) const;
    /// Override for name if present, otherwise fallback (used by identity groups).
    double get_or(const std::string& name, double fallback) const;
    /// Parses "name = value" lines; '#' starts a comment. Throws InputError.
    void merge_text(const std::string& text);
    /// Parses a single "NAME=VALUE" assignment.
    void set(const std::string& assignment);
};

/// Identity groups accepted as tolerance keys besides the predicate names.
const std::vector<std::string>& identity_groups();

/// Names of predicates 1..26 in order.
const std::vector<std::string>& predicate_names();
int predicate_id(const std::string& name);  // 0 when unknown

std::vector<PredicateResult> classify_point(const GeometryFrame& frame, const ToleranceConfig& tol);

/// max - min of one fitted parameter across points.
struct SpreadDiagnostic {
    std::string predicate;
    std::string param;
    std::vector<double> spread;  // per component
    std::vector<double> mean;
};

struct AggregateResult {
    std::string name;
    Verdict verdict = Verdict::not_applicable;
    int holds = 0, fails = 0, not_applicable = 0;
    double worst_ratio = 0.0;  // max residual / (tolerance * scale) over points
    std::string note;
};

/// Pair (stronger, weaker) whose verdicts contradict an implication at one point.
struct ImplicationViolation {
    std::size_t point = 0;
    std::string stronger, weaker;
};

struct ClassificationReport {
    std::string metric;
    int dim = 0;
    std::vector<ChartPoint> points;
    std::vector<std::vector<PredicateResult>> per_point;
    std::vector<AggregateResult> aggregate;
    std::vector<SpreadDiagnostic> spreads;
    std::vector<ImplicationViolation> violations;

    const AggregateResult& find(const std::string& name) const;
};

/// Implications checked per point: (stronger, weaker).
const std::vector<std::pair<std::string, std::string>>& implication_lattice();
std::vector<ImplicationViolation> check_implications(const std::vector<PredicateResult>& results, std::size_t point);

ClassificationReport classify_frames(const MetricSpec& spec, const std::vector<GeometryFrame>& frames,
                                     const ToleranceConfig& tol);
ClassificationReport classify_manifold(const MetricSpec& spec, const ChartDomain& domain, int count,
                                       const ToleranceConfig& tol);

/// Frames at every point, evaluated concurrently; order follows the input.
std::vector<GeometryFrame> compute_frames(const MetricSpec& spec, const std::vector<ChartPoint>& points);

// Shape fits, exposed for the synthetic identity tests.

/// Least-squares (mu, tau) with mu + tau = 1 in C = mu sym(hbar C)/(n+1) + tau C C C / C^2.
struct SemiReducibleFit {
    double mu = 0.0, tau = 0.0;
    double residual = 0.0, scale = 0.0;
};
SemiReducibleFit fit_semi_c_reducible(const NumTensor& c, const NumTensor& hbar, const NumTensor& g_inv);

/// Trace C_i = g^{jk} C_ijk.
NumTensor cartan_trace(const NumTensor& c, const NumTensor& g_inv);
/// S_hijk = C^m_hk C_imj - C^m_hj C_imk, C^m_ab = g^{ml} C_lab.
NumTensor v_curvature_from_cartan(const NumTensor& c, const NumTensor& g_inv);

}  // namespace finsler
