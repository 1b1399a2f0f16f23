#include "officetwin/value.hpp"

#include <charconv>
#include <cmath>

#include "officetwin/error.hpp"

namespace officetwin {

std::string format_number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) return std::to_string(x);
  return std::string(buf, end);
}

std::string Value::to_string() const {
  switch (kind()) {
    case Kind::boolean: return as_boolean() ? "true" : "false";
    case Kind::number: return format_number(as_number());
    case Kind::text: return as_text();
  }
  return {};
}

nlohmann::ordered_json Value::to_json() const {
  switch (kind()) {
    case Kind::boolean: return as_boolean();
    case Kind::number: {
      double x = as_number();
      // Integral values serialize without a fraction so card ids read naturally.
      if (std::isfinite(x) && x == std::floor(x) && std::fabs(x) < 9.0e15) {
        return static_cast<std::int64_t>(x);
      }
      return x;
    }
    case Kind::text: return as_text();
  }
  return nullptr;
}

Value Value::from_json(const nlohmann::json& j) {
  if (j.is_boolean()) return boolean(j.get<bool>());
  if (j.is_number()) return number(j.get<double>());
  if (j.is_string()) return text(j.get<std::string>());
  throw Error(ErrorCode::bad_request, "value must be a boolean, number, or string", j.dump());
}

}  // namespace officetwin
