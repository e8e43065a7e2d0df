#include "finsler/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace finsler {

using nlohmann::json;

namespace {

json tensor_json(const NumTensor& t, const char* indices) {
    std::vector<int> shape(static_cast<std::size_t>(t.rank()), t.dim());
    return {{"indices", indices}, {"shape", shape}, {"data", t.data()}};
}

json point_json(const ChartPoint& p, std::size_t index) {
    return {{"index", index}, {"x", p.x}, {"y", p.y}};
}

json params_json(const std::map<std::string, std::vector<double>>& params) {
    json out = json::object();
    for (const auto& [k, v] : params) out[k] = v;
    return out;
}

json envelope(const std::string& kind, const std::string& metric, int dim, const std::vector<ChartPoint>& points) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = kind;
    j["metric"] = metric;
    j["dim"] = dim;
    j["convention"] = convention_json();
    json pts = json::array();
    for (std::size_t i = 0; i < points.size(); ++i) pts.push_back(point_json(points[i], i));
    j["points"] = pts;
    return j;
}

json identity_result_json(const IdentityResult& r) {
    json j = {{"group", r.group},
              {"name", r.name},
              {"statement", r.statement},
              {"point", r.point},
              {"residual", r.residual},
              {"scale", r.scale},
              {"tolerance", r.tolerance},
              {"verdict", verdict_name(r.verdict)},
              {"params", params_json(r.params)}};
    if (!r.condition.empty()) j["condition"] = r.condition;
    return j;
}

std::string pad(std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
}

}  // namespace

std::string sci3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

json convention_json() {
    return {{"curvature_slots", CurvatureConvention::slot_order},
            {"curvature_sign", CurvatureConvention::kCurvatureSign},
            {"p_symmetry_sign", CurvatureConvention::kPSymmetrySign},
            {"p_symmetry_identity", "P_hijk - P_hikj + sign * S_hijk|0 = 0"},
            {"global_slots", "R(X,Y,Z,W) = g(R(X,Y)Z, W) = R_ZWXY"},
            {"layout", "row-major, first index slowest; upper indices first"},
            {"derivative_slot", "covariant derivative index appended last"},
            {"residual_norm", "Frobenius"}};
}

json tolerance_json(const ToleranceConfig& tol) {
    json o = json::object();
    for (const auto& [k, v] : tol.overrides) o[k] = v;
    return {{"default", tol.default_tolerance}, {"overrides", o}};
}

json frames_json(const MetricSpec& spec, const std::vector<GeometryFrame>& frames) {
    std::vector<ChartPoint> pts;
    for (const auto& f : frames) pts.push_back(f.point);
    json j = envelope("tensors", spec.name, spec.dim, pts);
    json fr = json::array();
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto& f = frames[i];
        json t;
        t["g"] = tensor_json(f.g, "ij");
        t["g_inv"] = tensor_json(f.g_inv, "^ij");
        t["cartan"] = tensor_json(f.cartan, "ijk");
        t["cartan_mixed"] = tensor_json(f.cartan_mixed, "^i jk");
        t["cartan_trace"] = tensor_json(f.cartan_trace, "i");
        t["ell"] = tensor_json(f.ell, "i");
        t["angular"] = tensor_json(f.angular, "ij");
        t["phi"] = tensor_json(f.phi, "^i j");
        t["spray"] = tensor_json(f.spray, "^h");
        t["barthel"] = tensor_json(f.barthel, "^h i");
        t["berwald"] = tensor_json(f.berwald, "^h ij");
        t["connection"] = tensor_json(f.connection, "^h ij");
        t["vh_torsion"] = tensor_json(f.vh_torsion, "^i jk");
        t["hv_torsion"] = tensor_json(f.hv_torsion, "^i jk");
        t["h_curvature"] = tensor_json(f.h_curv, "^i hjk");
        t["hv_curvature"] = tensor_json(f.hv_curv, "^i hjk");
        t["v_curvature"] = tensor_json(f.v_curv, "^i hjk");
        t["ricci_h"] = tensor_json(f.ricci_h, "ab");
        t["ricci_v"] = tensor_json(f.ricci_v, "ab");
        t["cartan_h"] = tensor_json(f.cartan_h, "hij|k");
        t["cartan_v"] = tensor_json(f.cartan_v, "ijk||l");
        t["v_curvature_h0"] = tensor_json(f.v_curv_h0, "hijk|0");
        json scales = json::object();
        for (const auto& [k, v] : f.scales) scales[k] = v;
        fr.push_back({{"point", i},
                      {"L", f.length},
                      {"det_g", f.det_g},
                      {"cartan_sq", f.cartan_sq},
                      {"scalar_h", f.scalar_h},
                      {"scalar_v", f.scalar_v},
                      {"tensors", t},
                      {"scales", scales}});
    }
    j["frames"] = fr;
    return j;
}

json classification_json(const ClassificationReport& rep, const ToleranceConfig& tol) {
    json j = envelope("classification", rep.metric, rep.dim, rep.points);
    j["tolerance"] = tolerance_json(tol);
    json preds = json::array();
    for (std::size_t p = 0; p < rep.per_point.size(); ++p)
        for (const auto& r : rep.per_point[p]) {
            json e = {{"point", p},
                      {"id", r.id},
                      {"name", r.name},
                      {"residual", r.residual},
                      {"scale", r.scale},
                      {"tolerance", r.tolerance},
                      {"params", params_json(r.params)},
                      {"verdict", verdict_name(r.verdict)}};
            if (!r.note.empty()) e["note"] = r.note;
            preds.push_back(std::move(e));
        }
    j["predicates"] = preds;
    json agg = json::object();
    for (const auto& a : rep.aggregate) {
        json e = {{"verdict", verdict_name(a.verdict)},
                  {"holds", a.holds},
                  {"fails", a.fails},
                  {"not_applicable", a.not_applicable},
                  {"worst_ratio", a.worst_ratio}};
        if (!a.note.empty()) e["note"] = a.note;
        agg[a.name] = std::move(e);
    }
    j["aggregate"] = agg;
    json spreads = json::array();
    for (const auto& s : rep.spreads)
        spreads.push_back({{"predicate", s.predicate}, {"param", s.param}, {"spread", s.spread}, {"mean", s.mean}});
    j["spreads"] = spreads;
    json viol = json::array();
    for (const auto& v : rep.violations) viol.push_back({{"point", v.point}, {"stronger", v.stronger}, {"weaker", v.weaker}});
    j["violations"] = viol;
    return j;
}

json identity_json(const IdentityReport& rep, const std::vector<IdentityResult>& synthetic, const ToleranceConfig& tol) {
    json j = classification_json(rep.classification, tol);
    j["kind"] = "verify";
    json ids = json::array();
    bool passed = rep.passed();
    for (const auto& r : rep.results) ids.push_back(identity_result_json(r));
    for (const auto& r : synthetic) {
        ids.push_back(identity_result_json(r));
        passed = passed && r.verdict != Verdict::fails;
    }
    j["identities"] = ids;
    j["passed"] = passed;
    return j;
}

std::string frames_text(const MetricSpec& spec, const std::vector<GeometryFrame>& frames) {
    std::ostringstream out;
    out << "metric " << spec.name << "  dim " << spec.dim << "\n";
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto& f = frames[i];
        out << "point " << i << "  x =";
        for (double v : f.point.x) out << ' ' << v;
        out << "  y =";
        for (double v : f.point.y) out << ' ' << v;
        out << "\n  L " << sci3(f.length) << "  det g " << sci3(f.det_g) << "  C^2 " << sci3(f.cartan_sq)
            << "  Sc^h " << sci3(f.scalar_h) << "  Sc^v " << sci3(f.scalar_v) << "\n";
        const std::pair<const char*, const NumTensor*> rows[] = {
            {"|C|", &f.cartan},       {"|Gamma|", &f.connection}, {"|R|", &f.h_curv},
            {"|P|", &f.hv_curv},      {"|S|", &f.v_curv},         {"|C_ijk|0|", &f.hv_torsion}};
        out << " ";
        for (const auto& [name, t] : rows) out << ' ' << name << ' ' << sci3(frobenius(*t));
        out << "\n";
    }
    return out.str();
}

std::string classification_text(const ClassificationReport& rep) {
    std::ostringstream out;
    out << "metric " << rep.metric << "  dim " << rep.dim << "  points " << rep.points.size() << "\n";
    out << pad("predicate", 22) << pad("verdict", 16) << pad("h/f/na", 10) << pad("residual", 11) << "scale\n";
    for (std::size_t q = 0; q < rep.aggregate.size(); ++q) {
        const auto& a = rep.aggregate[q];
        // residual and scale at the point with the worst ratio
        double residual = 0.0, scale = 0.0, worst = -1.0;
        for (const auto& pt : rep.per_point) {
            const auto& r = pt[q];
            if (r.verdict == Verdict::not_applicable) continue;
            const double ratio = r.scale > 0.0 ? r.residual / r.scale : r.residual;
            if (ratio > worst) {
                worst = ratio;
                residual = r.residual;
                scale = r.scale;
            }
        }
        const std::string counts = std::to_string(a.holds) + "/" + std::to_string(a.fails) + "/" + std::to_string(a.not_applicable);
        out << pad(a.name, 22) << pad(verdict_name(a.verdict), 16) << pad(counts, 10);
        if (worst < 0.0)
            out << pad("-", 11) << "-";
        else
            out << pad(sci3(residual), 11) << sci3(scale);
        if (!a.note.empty()) out << "  (" << a.note << ")";
        out << "\n";
    }
    if (!rep.violations.empty()) {
        out << "implication violations:\n";
        for (const auto& v : rep.violations) out << "  point " << v.point << ": " << v.stronger << " => " << v.weaker << "\n";
    }
    return out.str();
}

std::string identity_text(const IdentityReport& rep, const std::vector<IdentityResult>& synthetic) {
    struct Row {
        std::string group, name;
        int holds = 0, fails = 0, na = 0;
        double residual = 0.0, scale = 0.0, worst = -1.0;
    };
    std::vector<Row> rows;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    auto add = [&](const IdentityResult& r) {
        const auto key = std::make_pair(r.group, r.name);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, rows.size()).first;
            rows.push_back({r.group, r.name});
        }
        Row& row = rows[it->second];
        if (r.verdict == Verdict::holds) ++row.holds;
        else if (r.verdict == Verdict::fails) ++row.fails;
        else ++row.na;
        if (r.verdict == Verdict::not_applicable) return;
        const double ratio = r.scale > 0.0 ? r.residual / r.scale : r.residual;
        if (ratio > row.worst) {
            row.worst = ratio;
            row.residual = r.residual;
            row.scale = r.scale;
        }
    };
    for (const auto& r : rep.results) add(r);
    for (const auto& r : synthetic) add(r);

    std::ostringstream out;
    out << "metric " << rep.metric << "  dim " << rep.dim << "  points " << rep.points.size() << "\n";
    out << pad("group", 10) << pad("identity", 44) << pad("h/f/na", 10) << pad("residual", 11) << "scale\n";
    bool passed = true;
    for (const auto& row : rows) {
        passed = passed && row.fails == 0;
        const std::string counts = std::to_string(row.holds) + "/" + std::to_string(row.fails) + "/" + std::to_string(row.na);
        out << pad(row.group, 10) << pad(row.name, 44) << pad(counts, 10);
        if (row.worst < 0.0)
            out << pad("-", 11) << "-";
        else
            out << pad(sci3(row.residual), 11) << sci3(row.scale);
        out << "\n";
    }
    for (const auto& r : rep.results)
        if (r.verdict == Verdict::fails)
            out << "FAIL " << r.group << " " << r.name << " at point " << r.point << ": " << sci3(r.residual) << " > "
                << sci3(r.tolerance) << " * " << sci3(r.scale) << "\n";
    for (const auto& r : synthetic)
        if (r.verdict == Verdict::fails) out << "FAIL " << r.group << " " << r.name << ": " << sci3(r.residual) << "\n";
    out << (passed ? "all identities pass" : "identity failures present") << "\n";
    return out.str();
}

}  // namespace finsler
