#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/identities.hpp"

namespace finsler {

inline constexpr const char* kSchemaVersion = "1.0.0";

/// Slot order, sign choices and tensor layouts, embedded in every report.
nlohmann::json convention_json();
nlohmann::json tolerance_json(const ToleranceConfig& tol);

nlohmann::json frames_json(const MetricSpec& spec, const std::vector<GeometryFrame>& frames);
nlohmann::json classification_json(const ClassificationReport& rep, const ToleranceConfig& tol);
/// Classification envelope plus an "identities" array; synthetic results are appended with point -1.
nlohmann::json identity_json(const IdentityReport& rep, const std::vector<IdentityResult>& synthetic,
                             const ToleranceConfig& tol);

std::string frames_text(const MetricSpec& spec, const std::vector<GeometryFrame>& frames);
std::string classification_text(const ClassificationReport& rep);
std::string identity_text(const IdentityReport& rep, const std::vector<IdentityResult>& synthetic);

/// Scientific notation with 3 significant digits.
std::string sci3(double v);

}  // namespace finsler
