#include "officetwin/error.hpp"

namespace officetwin {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::schema: return "schema";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::domain: return "domain";
    case ErrorCode::permission: return "permission";
    case ErrorCode::reference: return "reference";
    case ErrorCode::type_mismatch: return "type_mismatch";
    case ErrorCode::syntax: return "syntax";
    case ErrorCode::oscillation: return "oscillation";
    case ErrorCode::auth: return "auth";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::capacity: return "capacity";
    case ErrorCode::configuration: return "configuration";
    case ErrorCode::comparability: return "comparability";
    case ErrorCode::bad_request: return "bad_request";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

SyntaxError::SyntaxError(std::size_t line, std::size_t column, std::string reason,
                         std::string source)
    : Error(ErrorCode::syntax, (source.empty() ? std::string() : source + ": ") + "line " +
                                   std::to_string(line) + ", column " + std::to_string(column) +
                                   ": " + reason),
      line_(line),
      column_(column),
      reason_(std::move(reason)) {}

namespace {

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += '"' + n + '"';
  }
  return out;
}

}  // namespace

OscillationError::OscillationError(std::vector<std::string> rules, int passes,
                                   std::optional<double> sim_time)
    : Error(ErrorCode::oscillation,
            (sim_time ? "at t=" + std::to_string(static_cast<long long>(*sim_time)) + "s: "
                      : std::string()) +
                "rules still changing state after " + std::to_string(passes) +
                " passes: " + join_names(rules)),
      rules_(std::move(rules)),
      passes_(passes),
      sim_time_(sim_time) {}

}  // namespace officetwin
