#pragma once

#include <string>

#include "hyplab/conditions.hpp"
#include "hyplab/dichotomy.hpp"
#include "hyplab/reduction.hpp"
#include "hyplab/system.hpp"

namespace hyplab {

/// Deterministic JSON renderings of the analysis reports: fixed key order,
/// lossless float round-trip. Each returns a serialized object (2-space
/// indentation, trailing newline) ready for stdout or a report file.
std::string report_json(const ExtremaReport& rep);
std::string report_json(const ConditionReport& rep);
std::string report_json(const CorollaryResult& rep);
std::string report_json(const UniquenessReport& rep);
std::string report_json(const TrichotomyResult& rep);
std::string report_json(const DichotomyReport& rep);

/// Structured error document for the diagnostic stream:
/// {"error": kind, "message": ...}.
std::string error_json(const std::string& kind, const std::string& message);

}  // namespace hyplab
