#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "latmin/lattice_core.hpp"
#include "latmin/log_value.hpp"

namespace latmin {

using Json = nlohmann::ordered_json;

Json norm_to_json(const NormSpec& norm);
NormSpec norm_from_json(const Json& j);

/// {"rank": r, "norm": {...}} with every rational as a "p/q" string.
Json module_to_json(const NormedModule& module);
NormedModule module_from_json(const Json& j);
NormedModule module_from_json_text(const std::string& text);

/// Accepts a "p/q" / decimal string or a JSON integer.
Rational rational_from_json(const Json& j);
/// Accepts a JSON number or anything rational_from_json accepts.
double real_from_json(const Json& j);

/// Decimal string with 12 significant digits.
std::string format_real(double x);

Json log_value_to_json(const LogValue& v);
Json vector_to_json(const IntVector& v);

}  // namespace latmin
