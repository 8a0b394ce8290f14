#pragma once

#include <string>

#include "json.hpp"
#include "lslab/verify.hpp"

namespace lslab {

// Value rounded to 12 significant digits, so that the shortest round-trip
// representation printed by the JSON writer has at most 12 digits.
double sig12(double v);

nlohmann::ordered_json profile_json(const BoundaryProfile& profile, double tol);
nlohmann::ordered_json census_json(const LevelSetCensus& census);
nlohmann::ordered_json verdict_json(const TheoremVerdict& v);

// Top-level keys in order: scenario, grid, boundary_profile, critical_points,
// censuses, verdicts, warnings, notes. The timestamp lives in
// scenario.timestamp and is the only field that varies between runs.
nlohmann::ordered_json report_json(const VerificationReport& report, const std::string& timestamp);
std::string report_text(const VerificationReport& report, const std::string& timestamp);

// Throws IoError when the file cannot be written.
void emit_report(const VerificationReport& report, const std::string& path, const std::string& timestamp);

// UTC, ISO 8601 with seconds.
std::string utc_timestamp();

}  // namespace lslab
