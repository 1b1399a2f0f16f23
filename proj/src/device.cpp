#include "officetwin/device.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "officetwin/error.hpp"

namespace officetwin {

PropertySchema PropertySchema::boolean(std::string name, WritableBy w) {
  PropertySchema s;
  s.name = std::move(name);
  s.kind = PropertyKind::boolean;
  s.writable_by = w;
  return s;
}

PropertySchema PropertySchema::enumeration(std::string name, std::vector<std::string> labels,
                                           WritableBy w) {
  PropertySchema s;
  s.name = std::move(name);
  s.kind = PropertyKind::enumeration;
  s.writable_by = w;
  s.labels = std::move(labels);
  return s;
}

PropertySchema PropertySchema::bounded(std::string name, double min, double max, std::string unit,
                                       WritableBy w, bool integral) {
  PropertySchema s;
  s.name = std::move(name);
  s.kind = PropertyKind::number;
  s.writable_by = w;
  s.min = min;
  s.max = max;
  s.unit = std::move(unit);
  s.integral = integral;
  return s;
}

bool PropertySchema::accepts(const Value& v) const {
  switch (kind) {
    case PropertyKind::boolean:
      return v.is_boolean();
    case PropertyKind::enumeration:
      return v.is_text() && std::find(labels.begin(), labels.end(), v.as_text()) != labels.end();
    case PropertyKind::number: {
      if (!v.is_number()) return false;
      double x = v.as_number();
      if (!std::isfinite(x) || x < min || x > max) return false;
      return !integral || x == std::floor(x);
    }
  }
  return false;
}

void PropertySchema::check() const {
  if (name.empty()) throw Error(ErrorCode::schema, "property name is empty");
  if (kind == PropertyKind::enumeration) {
    if (labels.empty()) {
      throw Error(ErrorCode::schema, "enumeration '" + name + "' has no labels", name + ".labels");
    }
    std::set<std::string> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size()) {
      throw Error(ErrorCode::schema, "enumeration '" + name + "' repeats a label", name + ".labels");
    }
  }
  if (kind == PropertyKind::number && !(min < max)) {
    throw Error(ErrorCode::schema, "number '" + name + "' needs min < max", name + ".min");
  }
}

const PropertySchema* DeviceDescriptor::find_property(const std::string& name) const {
  for (const auto& p : properties) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

void DeviceDescriptor::check() const {
  if (device_id.empty()) throw Error(ErrorCode::schema, "device_id is empty", "device_id");
  if (handle.empty()) throw Error(ErrorCode::schema, device_id + ": handle is empty", "handle");
  std::set<std::string> names;
  for (const auto& p : properties) {
    p.check();
    if (!names.insert(p.name).second) {
      throw Error(ErrorCode::schema, device_id + ": duplicate property '" + p.name + "'",
                  "properties." + p.name);
    }
  }
  for (const auto& [prop, value] : defaults) {
    const auto* schema = find_property(prop);
    if (schema == nullptr) {
      throw Error(ErrorCode::schema, device_id + ": default for undeclared property '" + prop + "'",
                  "defaults." + prop);
    }
    if (!schema->accepts(value)) {
      throw Error(ErrorCode::schema,
                  device_id + ": default " + value.to_string() + " outside domain of '" + prop + "'",
                  "defaults." + prop);
    }
  }
  for (const auto& p : properties) {
    if (!defaults.contains(p.name)) {
      throw Error(ErrorCode::schema, device_id + ": no default for '" + p.name + "'",
                  "defaults." + p.name);
    }
  }
}

std::string_view cause_name(Cause::Kind k) {
  switch (k) {
    case Cause::Kind::rule: return "rule";
    case Cause::Kind::command: return "command";
    case Cause::Kind::environment: return "environment";
    case Cause::Kind::initialization: return "initialization";
  }
  return "environment";
}

Cause::Kind parse_cause_kind(std::string_view s) {
  if (s == "rule") return Cause::Kind::rule;
  if (s == "command") return Cause::Kind::command;
  if (s == "environment") return Cause::Kind::environment;
  if (s == "initialization") return Cause::Kind::initialization;
  throw Error(ErrorCode::bad_request, "unknown cause '" + std::string(s) + "'");
}

const Value& DeviceState::at(const std::string& property) const {
  auto it = values.find(property);
  if (it == values.end()) {
    throw Error(ErrorCode::not_found, device_id + " has no property '" + property + "'");
  }
  return it->second;
}

DeviceState instantiate(const DeviceDescriptor& descriptor) {
  descriptor.check();
  DeviceState state;
  state.device_id = descriptor.device_id;
  for (const auto& p : descriptor.properties) {
    state.values.emplace(p.name, descriptor.defaults.at(p.name));
    state.last_changed.emplace(p.name, 0.0);
  }
  return state;
}

void check_write(const DeviceDescriptor& descriptor, const std::string& property,
                 const Value& value, const Cause& cause) {
  const auto* schema = descriptor.find_property(property);
  if (schema == nullptr) {
    throw Error(ErrorCode::not_found,
                descriptor.handle + " has no property '" + property + "'");
  }
  if (!schema->accepts(value)) {
    throw Error(ErrorCode::domain, value.to_string() + " is outside the domain of " +
                                       descriptor.handle + "." + property);
  }
  bool sensor = schema->writable_by == WritableBy::sensor;
  bool allowed = false;
  switch (cause.kind) {
    case Cause::Kind::initialization: allowed = true; break;
    case Cause::Kind::environment: allowed = sensor; break;
    case Cause::Kind::rule:
    case Cause::Kind::command: allowed = !sensor; break;
  }
  if (!allowed) {
    throw Error(ErrorCode::permission,
                descriptor.handle + "." + property +
                    (sensor ? " is a sensor reading" : " is not a sensor reading") +
                    " and cannot be written by " + std::string(cause_name(cause.kind)));
  }
}

std::optional<StateChange> apply_change(DeviceState& state, const DeviceDescriptor& descriptor,
                                        const std::string& property, const Value& value,
                                        const Cause& cause, SimTime sim_time) {
  check_write(descriptor, property, value, cause);
  auto& current = state.values.at(property);
  if (current == value) return std::nullopt;
  StateChange change{sim_time, state.device_id, property, current, value, cause};
  current = value;
  state.last_changed[property] = sim_time;
  return change;
}

}  // namespace officetwin
