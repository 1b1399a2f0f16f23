#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "officetwin/scenario.hpp"
#include "officetwin/trace.hpp"

namespace officetwin {

/// Resource ratings for one device kind. Keys of the inner maps are property
/// values in rule-file spelling ("true", "High").
struct KindProfile {
  bool comfort = false;  // counted as a comfort load (baseline holds it on)
  std::map<std::string, std::map<std::string, double>> draw_watts;
  std::map<std::string, std::map<std::string, double>> flow_lpm;
  std::string generation_property;  // numeric property carrying generated watts
  double rated_watts = 0.0;

  friend bool operator==(const KindProfile&, const KindProfile&) = default;
};

struct PowerProfile {
  std::map<std::string, KindProfile> kinds;

  /// Throws Error(schema) on negative ratings.
  void check() const;
  nlohmann::ordered_json to_json() const;
  static PowerProfile from_json(const nlohmann::json& j);
  static PowerProfile load(const std::filesystem::path& path);
};

/// The shipped illustrative ratings.
PowerProfile default_profile();

struct DeviceLedger {
  std::string device_id;
  std::string kind;
  bool comfort = false;
  double energy_wh = 0.0;
  double water_l = 0.0;
  double generated_wh = 0.0;
  double on_seconds = 0.0;              // seconds with a non-zero draw or flow
  double unoccupied_on_seconds = 0.0;   // comfort loads only
};

struct ResourceLedger {
  double duration = 0.0;
  std::vector<DeviceLedger> devices;
  double energy_wh = 0.0;
  double comfort_energy_wh = 0.0;
  double water_l = 0.0;
  double generated_wh = 0.0;
  double occupied_seconds = 0.0;
  double unoccupied_on_seconds = 0.0;

  nlohmann::ordered_json to_json() const;
};

/// Integrates a complete trace against a profile. Throws Error(configuration)
/// listing every device kind the profile does not cover.
ResourceLedger accumulate(const SimTrace& trace, const PowerProfile& profile);

/// The always-on counterfactual: same stimuli and rules, but fan, light, AC
/// and street lamp are held on for the whole work window.
Scenario baseline_transform(const Scenario& scenario);

struct SdgIndicator {
  std::string target;  // "6.4", "7.3", "7b", ...
  std::string indicator;
  std::string unit;
  std::optional<double> baseline;
  std::optional<double> automated;
  std::optional<double> relative_change;
  std::string note;
};

struct SdgReport {
  std::vector<SdgIndicator> rows;

  const SdgIndicator* find(const std::string& target, const std::string& indicator = {}) const;
  nlohmann::ordered_json to_json() const;
  std::string to_table() const;
};

/// (automated - baseline) / baseline, undefined when baseline is not positive.
std::optional<double> relative_change(double baseline, double automated);

/// Combined resource index: one point per kWh plus one point per 100 L of water.
double resource_index(const ResourceLedger& ledger);

/// Throws Error(comparability) when the ledgers cover different durations.
SdgReport sdg_report(const ResourceLedger& automated, const ResourceLedger& baseline);

}  // namespace officetwin
