#pragma once

#include "ginidyn/dist.hpp"
#include "ginidyn/dynamics.hpp"
#include "ginidyn/verifier.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace ginidyn {

using json = nlohmann::json;

/// %.17g, independent of the global locale.
std::string format_double(double x);

/// {"trunc": N, "probs": [p_0, ..., p_N]}
json dist_to_json(const Dist& d);
/// Rejects missing fields, non-numeric entries and len(probs) != trunc + 1,
/// then validates the distribution.
Dist dist_from_json(const json& j, const Tolerances& tol = {});

Dist read_dist_file(const std::filesystem::path& path, const Tolerances& tol = {});
void write_dist_file(const std::filesystem::path& path, const Dist& d);

/// Parses a JSON document; ParseError carries the parser diagnostic.
json read_json_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string trajectory_csv(const TrajectoryRecord& record);
json trajectory_json(const TrajectoryRecord& record);

/// {name: {count, failures, min_slack, tight, witnesses: [distribution objects]}}
json sweep_report_json(const SweepReport& report);

}  // namespace ginidyn
