#pragma once

#include "carlab/car_analysis.hpp"
#include "carlab/scenarios.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace carlab {

using Json = nlohmann::ordered_json;

/// "p/q" (or "p") string -> Rational. Throws ParseError naming `where`.
Rational rational_from_json(const Json& value, const std::string& where);

/**
 * Scenario file format:
 *   {"worlds": [labels], "prior": {label: "p/q"},
 *    "observations": [{"kind": "event", "name": n, "set": [labels]}
 *                     | {"kind": "jeffrey" | "constraint", "name": n,
 *                        "sets": [[labels]], "alphas": ["p/q"],
 *                        "odds": [{"numerator": [labels], "denominator": [labels],
 *                                  "ratio": "p/q"}]}],
 *    "kernel": {world: {observation: "p/q"}}}
 * "odds" is optional and constraint-only. Without "kernel" the file describes
 * a prior and its possible observations. Optional "name" and "parameters"
 * ({key: "p/q"}) are carried through. Throws ParseError (malformed JSON or
 * rationals, wrong field types) and ValidationError (unknown labels, prior not
 * normalized, inaccurate or malformed content).
 */
ScenarioSpec parse_scenario(const std::string& text);
ScenarioSpec load_scenario(const std::filesystem::path& path);

/// Inverse of parse_scenario. Kernel rows of zero-prior worlds (absent from
/// the joint) put all mass on the first observation that contains the world.
Json scenario_to_json(const ScenarioSpec& spec);

Json event_to_json(const WorldSet& space, const Event& e);
Json observation_to_json(const WorldSet& space, const Observation& o);
Json distribution_to_json(const NaiveDistribution& d);
Json distribution_to_json(const FloatDistribution& d);

/// Field names follow the structs: observation (index), holds, kernel_values
/// (label -> "p/q" or null off the support), witness ([label, label] or null),
/// posterior_check.
Json car_report_to_json(const WorldSet& space, const CarReport& report);
/// compatible, best_prior, residual, restarts_used, certificate_accurate,
/// certificate_gap.
Json fixed_point_to_json(const FixedPointResult& result);

}  // namespace carlab
