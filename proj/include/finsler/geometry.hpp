#pragma once

#include <map>
#include <memory>
#include <string>

#include "finsler/jet.hpp"
#include "finsler/metric.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

using JetTensor = Tensor<Jet>;

/// Slot order and sign shared by every curvature tensor.
///
/// R(d_j, d_k) d_h = R^i_hjk d_i: the plane pair occupies the last two slots and the
/// vector acted on sits in the first lower slot. Lowering uses the first upper slot
/// (R_hijk = g_il R^l_hjk). kCurvatureSign multiplies the displayed local formula; it is
/// fixed so that the unit 2-sphere has R_hijk = +(g_hj g_ik - g_hk g_ij).
struct CurvatureConvention {
    static constexpr const char* slot_order = "R(d_j,d_k)d_h = R^i_hjk d_i; R_hijk = g_il R^l_hjk";
    static constexpr double kCurvatureSign = 1.0;
    /// Sign s in P_hijk - P_hikj + s * S_hijk|0 = 0, calibrated on a fixture with S|0 != 0.
    static constexpr double kPSymmetrySign = 1.0;
};

/// Covariant derivative result: components with the new slot appended last, plus the sum
/// of Frobenius norms of the additive terms (the residual normaliser).
struct CovDerivative {
    JetTensor jets;  // empty unless requested
    NumTensor values;
    double scale = 0.0;
};

/// Jet-level geometric data at one chart point; the engine behind every derivative.
class FrameContext {
public:
    FrameContext(const MetricSpec& spec, const ChartPoint& point);

    int dim() const noexcept { return n_; }
    const ChartPoint& point() const noexcept { return point_; }
    const JetSpace& space() const noexcept { return *space_; }

    Jet y(int i) const { return Jet::variable(space_.get(), n_ + i, point_.y[static_cast<std::size_t>(i)]); }
    Jet constant(double v) const { return Jet(space_.get(), v); }

    const Jet& energy() const noexcept { return energy_; }
    const Jet& length() const noexcept { return length_; }
    const JetTensor& metric() const noexcept { return g_; }
    const JetTensor& inverse_metric() const noexcept { return ginv_; }
    const JetTensor& cartan() const noexcept { return cartan_; }        // C_ijk
    const JetTensor& cartan_mixed() const noexcept { return cartan_m_; }  // C^h_ij
    const JetTensor& spray() const noexcept { return spray_; }          // G^h
    const JetTensor& barthel() const noexcept { return barthel_; }      // G^h_i
    const JetTensor& berwald() const noexcept { return berwald_; }      // G^h_ij
    const JetTensor& connection() const noexcept { return gamma_; }     // Gamma^h_ij
    double det_metric() const noexcept { return det_g_; }

    /// delta_k T with k appended.
    JetTensor horizontal(const JetTensor& t) const;
    /// dy_k T with k appended.
    JetTensor vertical(const JetTensor& t) const;

    /// Cartan h- and v-covariant derivatives. The first `upper` slots of t are contravariant.
    CovDerivative h_cov(const JetTensor& t, int upper, bool keep_jets = false) const;
    CovDerivative v_cov(const JetTensor& t, int upper, bool keep_jets = false) const;

private:
    CovDerivative covariant(const JetTensor& t, int upper, bool horizontal_dir, bool keep_jets) const;

    int n_;
    ChartPoint point_;
    std::shared_ptr<const JetSpace> space_;
    Jet energy_, length_;
    JetTensor g_, ginv_, cartan_, cartan_m_, spray_, barthel_, berwald_, gamma_;
    double det_g_ = 0.0;
};

NumTensor values(const JetTensor& t);
/// Contracts the last slot with v.
NumTensor contract_last(const NumTensor& t, const std::vector<double>& v);

/// All tensors of the calculus at one chart point.
struct GeometryFrame {
    int dim = 0;
    ChartPoint point;
    double length = 0.0;
    double energy = 0.0;

    NumTensor g, g_inv;
    double det_g = 0.0;

    NumTensor cartan;           // C_ijk
    NumTensor cartan_mixed;     // C^i_jk
    NumTensor cartan_trace;     // C_i
    NumTensor cartan_trace_up;  // C^i
    double cartan_sq = 0.0;     // C_i C^i

    NumTensor ell;       // l_i
    NumTensor ell_up;    // l^i
    NumTensor angular;   // hbar_ij
    NumTensor phi;       // phi^i_j

    NumTensor spray;        // G^h
    NumTensor barthel;      // G^h_i
    NumTensor berwald;      // G^h_ij
    NumTensor berwald_dot;  // G^h_ijk
    NumTensor christoffel;  // formal gamma^h_ij
    NumTensor connection;   // Gamma^h_ij

    NumTensor vh_torsion;    // R^i_jk
    NumTensor hv_torsion;    // Phat^i_jk
    NumTensor h_curv;        // R^i_hjk
    NumTensor hv_curv;       // P^i_hjk
    NumTensor v_curv;        // S^i_hjk
    NumTensor h_curv_low;    // R_hijk
    NumTensor hv_curv_low;   // P_hijk
    NumTensor v_curv_low;    // S_hijk

    NumTensor ricci_h;  // Ric^h(d_a, d_b) = R^m_bam
    double scalar_h = 0.0;
    NumTensor ricci_v;  // Ric^v(d_a, d_b) = S^m_bam
    double scalar_v = 0.0;

    NumTensor cartan_h;         // C_hij|k
    NumTensor cartan_mixed_h;   // C^h_ij|k
    NumTensor cartan_v;         // C_ijk||l
    NumTensor cartan_dot;       // dy_l C_ijk
    NumTensor cartan_trace_h0;  // C_i|0
    NumTensor v_curv_h;         // S_hijk|m
    NumTensor v_curv_h0;        // S_hijk|0
    NumTensor v_curv_v;         // S_hijk||m
    NumTensor v_curv_vv;        // S_hijk||m||n

    NumTensor metric_h;   // g_ij|k
    NumTensor metric_v;   // g_ij||k
    NumTensor length_h;   // L|k
    NumTensor angular_h;  // hbar_ij|k

    /// Sum of Frobenius norms of additive terms, keyed by field name.
    std::map<std::string, double> scales;

    double scale(const std::string& key) const;
};

GeometryFrame compute_frame(const MetricSpec& spec, const ChartPoint& point);
GeometryFrame compute_frame(const FrameContext& ctx);

/// Projection onto the indicatory part: every slot is contracted with phi.
/// `upper` leading slots are contravariant (0 or 1).
NumTensor apply_projection(const GeometryFrame& f, const NumTensor& t, int upper);

/// Tensors built from the Ricci data; slots follow global argument order.
struct DerivedTensors {
    NumTensor F;        // F(X,Y)
    NumTensor F_op;     // F_o(X)^i with g(F_o(X), Y) = F(X, Y); layout (i, x)
    NumTensor Fa, Fb;   // F(eta, .), F(., eta)
    NumTensor m;        // P.F
    NumTensor m_op;     // m_o, layout (i, x)
    NumTensor a, b;     // L^-1 P.Fa, L^-1 P.Fb
    NumTensor a_up, b_up;
    double c = 0.0;     // L^-2 F(eta, eta)
    double r = 0.0;     // Sc^h / (n-1)
    NumTensor R_hat;    // R(X,Y)eta, layout (i, x, y)
    NumTensor H;        // R(eta, X)eta, layout (i, x)
    NumTensor Psi;      // global slots (X, Y, Z, W)
    NumTensor R_global; // g(R(X,Y)Z, W), slots (X, Y, Z, W)
    double scale_F = 0.0;
    double scale_Psi = 0.0;
};

/// Throws DimensionTooSmall for n < 3.
DerivedTensors derived_tensors(const GeometryFrame& f);

}  // namespace finsler
