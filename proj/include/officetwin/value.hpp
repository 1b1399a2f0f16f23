#pragma once

#include <string>
#include <variant>

#include "json.hpp"

namespace officetwin {

/// A property value: boolean, number, or enumeration label.
class Value {
 public:
  enum class Kind { boolean, number, text };

  Value() : data_(false) {}

  static Value boolean(bool b) { return Value(Data{std::in_place_index<0>, b}); }
  static Value number(double x) { return Value(Data{std::in_place_index<1>, x}); }
  static Value text(std::string s) { return Value(Data{std::in_place_index<2>, std::move(s)}); }

  Kind kind() const noexcept { return static_cast<Kind>(data_.index()); }
  bool is_boolean() const noexcept { return kind() == Kind::boolean; }
  bool is_number() const noexcept { return kind() == Kind::number; }
  bool is_text() const noexcept { return kind() == Kind::text; }

  bool as_boolean() const { return std::get<0>(data_); }
  double as_number() const { return std::get<1>(data_); }
  const std::string& as_text() const { return std::get<2>(data_); }

  /// Rule-file spelling: true/false, shortest round-trip number, or the label.
  std::string to_string() const;

  nlohmann::ordered_json to_json() const;
  static Value from_json(const nlohmann::json& j);

  friend bool operator==(const Value&, const Value&) = default;

 private:
  using Data = std::variant<bool, double, std::string>;
  explicit Value(Data d) : data_(std::move(d)) {}
  Data data_;
};

std::string format_number(double x);

}  // namespace officetwin
