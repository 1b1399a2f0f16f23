#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "officetwin/value.hpp"

namespace officetwin {

using SimTime = double;

enum class PropertyKind { boolean, enumeration, number };

/// Who may write a property. Sensor properties are only fed by the environment.
enum class WritableBy { command, sensor };

struct PropertySchema {
  std::string name;
  PropertyKind kind = PropertyKind::boolean;
  WritableBy writable_by = WritableBy::command;
  std::vector<std::string> labels;  // enumeration only
  double min = 0.0;                 // number only
  double max = 1.0;
  std::string unit;
  bool integral = false;

  bool accepts(const Value& v) const;
  /// Throws Error(schema) when the schema itself is malformed.
  void check() const;

  static PropertySchema boolean(std::string name, WritableBy w = WritableBy::command);
  static PropertySchema enumeration(std::string name, std::vector<std::string> labels,
                                    WritableBy w = WritableBy::command);
  static PropertySchema bounded(std::string name, double min, double max, std::string unit,
                                WritableBy w = WritableBy::sensor, bool integral = false);

  friend bool operator==(const PropertySchema&, const PropertySchema&) = default;
};

struct DeviceDescriptor {
  std::string device_id;  // opaque serial
  std::string handle;     // identifier used in rule files
  std::string kind;
  std::string display_name;
  std::string segment = "office";
  std::vector<PropertySchema> properties;
  std::map<std::string, Value> defaults;
  std::map<std::string, double> ratings;

  const PropertySchema* find_property(const std::string& name) const;
  /// Throws Error(schema) naming the offending field.
  void check() const;

  friend bool operator==(const DeviceDescriptor&, const DeviceDescriptor&) = default;
};

struct Cause {
  enum class Kind { rule, command, environment, initialization };
  Kind kind = Kind::environment;
  std::string source;  // rule name or session/user

  static Cause rule(std::string name) { return {Kind::rule, std::move(name)}; }
  static Cause command(std::string who) { return {Kind::command, std::move(who)}; }
  static Cause environment() { return {Kind::environment, {}}; }
  static Cause initialization() { return {Kind::initialization, {}}; }

  friend bool operator==(const Cause&, const Cause&) = default;
};

std::string_view cause_name(Cause::Kind k);
Cause::Kind parse_cause_kind(std::string_view s);

struct StateChange {
  SimTime sim_time = 0.0;
  std::string device_id;
  std::string property;
  Value old_value;
  Value new_value;
  Cause cause;

  friend bool operator==(const StateChange&, const StateChange&) = default;
};

struct DeviceState {
  std::string device_id;
  std::map<std::string, Value> values;
  std::map<std::string, SimTime> last_changed;

  const Value& at(const std::string& property) const;
  friend bool operator==(const DeviceState&, const DeviceState&) = default;
};

DeviceState instantiate(const DeviceDescriptor& descriptor);

/// Validated write. Returns nothing when the value is already current.
std::optional<StateChange> apply_change(DeviceState& state, const DeviceDescriptor& descriptor,
                                        const std::string& property, const Value& value,
                                        const Cause& cause, SimTime sim_time);

/// Checks a write without performing it; throws the same errors as apply_change.
void check_write(const DeviceDescriptor& descriptor, const std::string& property,
                 const Value& value, const Cause& cause);

}  // namespace officetwin
