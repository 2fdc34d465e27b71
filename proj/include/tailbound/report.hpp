#pragma once

// JSON model files and JSON serialisation of every result type.

#include <string>

#include <json.hpp>

#include "tailbound/classical_bounds.hpp"
#include "tailbound/dist_model.hpp"
#include "tailbound/oracle.hpp"
#include "tailbound/sharp_bounds.hpp"
#include "tailbound/tilted_measure.hpp"

namespace tailbound {

inline constexpr int kSchemaVersion = 1;

/// Parses {"components": [{"atoms": [[value, prob], ...], "multiplicity": k}, ...]}.
/// Throws Error(parse_error) naming the offending field, or invalid_model
/// with the first violated invariant.
SumModel parse_model(const std::string& text);
SumModel load_model_file(const std::string& path);
nlohmann::json model_to_json(const SumModel& model);

nlohmann::json to_json(const BoundValue& b);
nlohmann::json to_json(const SharpInterval& s);
nlohmann::json to_json(const TailEstimate& t);
nlohmann::json to_json(const LemmaSuiteReport& r);
nlohmann::json to_json(const BerryEsseenReport& r);
nlohmann::json to_json(const ConditionAReport& r);
nlohmann::json to_json(const MomentProfile& m);

}  // namespace tailbound
