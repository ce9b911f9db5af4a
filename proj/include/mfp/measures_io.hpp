#pragma once

#include <string>

#include <json.hpp>

#include "mfp/measures.hpp"

namespace mfp {

/// Parse the measure schema {"space", "atoms", "mass_at_zero", "ac"}. Throws ParseError.
Measure parse_measure(const nlohmann::json& j);
Measure load_measure(const std::string& path);
nlohmann::json to_json(const Measure& mu);

}  // namespace mfp
