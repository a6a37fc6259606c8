#include "latmin/json_io.hpp"

#include <cmath>
#include <cstdio>

#include "latmin/error.hpp"

namespace latmin {

namespace {

Json matrix_to_json(const RationalMatrix& m) {
  Json rows = Json::array();
  for (const auto& row : m) {
    Json r = Json::array();
    for (const auto& x : row) r.push_back(format_rational(x));
    rows.push_back(std::move(r));
  }
  return rows;
}

RationalMatrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array()) fail(ErrorCode::SchemaViolation, std::string(what) + " must be an array of rows");
  RationalMatrix m;
  for (const auto& row : j) {
    if (!row.is_array()) fail(ErrorCode::SchemaViolation, std::string(what) + " rows must be arrays");
    std::vector<Rational> r;
    for (const auto& x : row) r.push_back(rational_from_json(x));
    m.push_back(std::move(r));
  }
  return m;
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    fail(ErrorCode::SchemaViolation, std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(BigInt(std::to_string(j.get<long long>())));
  fail(ErrorCode::SchemaViolation, "expected a rational encoded as a \"p/q\" string, got " + j.dump());
}

double real_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  return rational_from_json(j).get_d();
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // no negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

Json norm_to_json(const NormSpec& norm) {
  return std::visit(
      [](const auto& n) -> Json {
        using T = std::decay_t<decltype(n)>;
        Json j;
        if constexpr (std::is_same_v<T, Ellipsoid>) {
          j["type"] = "ellipsoid";
          j["gram"] = matrix_to_json(n.gram);
        } else if constexpr (std::is_same_v<T, PolyMax>) {
          j["type"] = "polymax";
          j["functionals"] = matrix_to_json(n.functionals);
        } else {
          j["type"] = "scaled";
          j["alpha"] = format_rational(n.alpha);
          j["inner"] = norm_to_json(*n.inner);
        }
        return j;
      },
      norm.variant());
}

NormSpec norm_from_json(const Json& j) {
  const auto type = require(j, "type");
  if (!type.is_string()) fail(ErrorCode::SchemaViolation, "norm type must be a string");
  const auto t = type.get<std::string>();
  if (t == "ellipsoid") return Ellipsoid{matrix_from_json(require(j, "gram"), "gram")};
  if (t == "polymax")
    return PolyMax{matrix_from_json(require(j, "functionals"), "functionals")};
  if (t == "scaled")
    return Scaled{std::make_shared<const NormSpec>(norm_from_json(require(j, "inner"))),
                  rational_from_json(require(j, "alpha"))};
  fail(ErrorCode::SchemaViolation, "unknown norm type '" + t + "'");
}

Json module_to_json(const NormedModule& module) {
  Json j;
  j["rank"] = module.rank();
  j["norm"] = norm_to_json(module.norm());
  return j;
}

NormedModule module_from_json(const Json& j) {
  const auto& rank = require(j, "rank");
  if (!rank.is_number_integer() || rank.get<long long>() < 0)
    fail(ErrorCode::SchemaViolation, "rank must be a nonnegative integer");
  return make_normed_module(rank.get<std::size_t>(), norm_from_json(require(j, "norm")));
}

NormedModule module_from_json_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
  }
  return module_from_json(j);
}

Json log_value_to_json(const LogValue& v) {
  Json j;
  j["constant"] = format_rational(v.constant());
  j["log_pi"] = format_rational(v.pi_coeff());
  Json terms = Json::array();
  for (const auto& t : v.terms())
    terms.push_back(Json::array({format_rational(t.coeff), format_rational(t.arg)}));
  j["log_terms"] = std::move(terms);
  return j;
}

Json vector_to_json(const IntVector& v) {
  Json j = Json::array();
  for (auto x : v) j.push_back(x);
  return j;
}

}  // namespace latmin
