#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace officetwin {

enum class ErrorCode {
  schema,
  not_found,
  domain,
  permission,
  reference,
  type_mismatch,
  syntax,
  oscillation,
  auth,
  conflict,
  capacity,
  configuration,
  comparability,
  bad_request,
  io,
};

/// Stable wire name, used in HTTP error bodies and CLI messages.
std::string_view code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t column, std::string reason, std::string source = {});

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string reason_;
};

class OscillationError : public Error {
 public:
  OscillationError(std::vector<std::string> rules, int passes,
                   std::optional<double> sim_time = std::nullopt);

  const std::vector<std::string>& rules() const noexcept { return rules_; }
  int passes() const noexcept { return passes_; }
  std::optional<double> sim_time() const noexcept { return sim_time_; }

 private:
  std::vector<std::string> rules_;
  int passes_;
  std::optional<double> sim_time_;
};

}  // namespace officetwin
