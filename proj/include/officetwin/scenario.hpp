#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "officetwin/environment.hpp"
#include "officetwin/rules.hpp"

namespace officetwin {

struct PropertyAssignment {
  std::string device;
  std::string property;
  Value value;

  friend bool operator==(const PropertyAssignment&, const PropertyAssignment&) = default;
};

/// Half-open interval of simulated seconds.
struct TimeWindow {
  SimTime from = 0.0;
  SimTime to = 0.0;

  bool contains(SimTime t) const { return from <= t && t < to; }
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

/// Static always-on policy: during `window` the listed properties are held at
/// their values and rules may not write them.
struct HoldPolicy {
  TimeWindow window;
  std::vector<PropertyAssignment> hold;

  friend bool operator==(const HoldPolicy&, const HoldPolicy&) = default;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  double duration = 0.0;
  double timestep = 1.0;
  double snapshot_every = 3600.0;  // 0 disables periodic snapshots
  double command_hold = 300.0;     // seconds an operator command shields a property from rules
  EnvironmentConstants constants;
  std::vector<PropertyAssignment> initial;
  std::vector<Stimulus> stimuli;  // sorted by `at`
  TimeWindow work_window{8 * 3600.0, 18 * 3600.0};
  std::optional<HoldPolicy> policy;
  std::string rules_path;    // as written in the file
  std::string catalog_path;  // optional

  /// Throws Error(bad_request) on an invalid scenario.
  void check() const;

  nlohmann::ordered_json to_json() const;
  static Scenario from_json(const nlohmann::json& j);
  /// Loads and resolves relative rules/catalog paths against the file's directory.
  static Scenario load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

}  // namespace officetwin
