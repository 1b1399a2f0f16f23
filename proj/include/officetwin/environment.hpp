#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "officetwin/device.hpp"
#include "officetwin/world.hpp"

namespace officetwin {

struct EnvironmentState {
  SimTime sim_time = 0.0;
  double smoke_level = 0.0;   // [0,1]
  bool fire_present = false;
  double wind_speed = 0.0;    // m/s, [0,100]
  double humidity_pct = 50.0; // [0,100]
  double co2_ppm = 400.0;     // [0,10000]
  int occupancy = 0;
  double daylight = 0.0;      // [0,1]

  /// Clamps every field into its domain.
  void clamp();
  bool within_bounds() const;

  nlohmann::ordered_json to_json() const;
  static EnvironmentState from_json(const nlohmann::json& j);

  friend bool operator==(const EnvironmentState&, const EnvironmentState&) = default;
};

/// Model constants; all overridable from a scenario file.
struct EnvironmentConstants {
  double motion_hold = 30.0;     // s a motion pulse keeps the detector on
  double card_hold = 5.0;        // s a scanned card stays on the reader
  double t_extinguish = 30.0;    // s of continuous sprinkling that puts a fire out
  double k_decay = 0.01;         // 1/s natural smoke decay
  double k_blower = 0.10;        // 1/s extra decay with blower on High
  double k_window = 0.05;        // 1/s extra decay with a window open
  double wind_threshold = 8.0;   // m/s, used by checks; the rule file holds its own copy
  double humidifier_rate = 0.02; // %/s while the humidifier runs
  double k_humidity = 1.0 / 1800.0;
  double ambient_humidity = 50.0;
  double ambient_co2 = 400.0;
  double co2_per_person = 150.0; // ppm of steady-state rise per occupant
  double k_co2 = 1.0 / 600.0;
  double k_co2_window = 1.0 / 300.0;
  double smoke_noise = 0.0;      // std-dev of seeded sensor jitter, off by default

  nlohmann::ordered_json to_json() const;
  /// Applies overrides present in `j`; unknown keys are an error.
  void merge(const nlohmann::json& j);

  friend bool operator==(const EnvironmentConstants&, const EnvironmentConstants&) = default;
};

struct Stimulus {
  enum class Kind {
    motion_pulse,
    card_scan,
    fire_start,
    fire_end,
    wind_set,
    occupancy_set,
    smoke_inject,
    daylight_set,
  };

  SimTime at = 0.0;
  Kind kind = Kind::motion_pulse;
  double value = 0.0;     // card id, wind speed, occupant count, injection rate, daylight
  double duration = 0.0;  // smoke_inject only

  /// Throws Error(bad_request) when parameters are out of domain.
  void check() const;

  nlohmann::ordered_json to_json() const;
  static Stimulus from_json(const nlohmann::json& j);

  friend bool operator==(const Stimulus&, const Stimulus&) = default;
};

std::string_view stimulus_name(Stimulus::Kind k);

/// Physical environment plus the short-lived sensor latches (motion hold, card hold).
class Environment {
 public:
  Environment(EnvironmentConstants constants, std::uint64_t seed);

  const EnvironmentState& state() const noexcept { return state_; }
  EnvironmentState& state() noexcept { return state_; }
  const EnvironmentConstants& constants() const noexcept { return constants_; }

  void apply(const Stimulus& s);

  /// Copies environment readings onto sensor properties (cause: environment).
  std::vector<StateChange> sense(World& world);

  /// Actuator feedback over one step of length dt; results are clamped.
  void couple_actuators(const World& world, double dt);

  double injection_rate() const;
  bool motion_active() const { return state_.sim_time < motion_until_; }

 private:
  EnvironmentConstants constants_;
  EnvironmentState state_;
  SimTime motion_until_ = -1.0;
  double card_id_ = 0.0;
  SimTime card_until_ = -1.0;
  struct Injection {
    SimTime from;
    SimTime until;
    double rate;
  };
  std::vector<Injection> injections_;
  double sprinkled_for_ = 0.0;
  std::mt19937_64 rng_;
};

}  // namespace officetwin
