#include "officetwin/environment.hpp"

#include <algorithm>
#include <cmath>

#include "officetwin/error.hpp"

namespace officetwin {

namespace {

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

const Value* lookup(const World& world, const char* handle, const char* property) {
  auto i = world.index_of(handle);
  if (!i) return nullptr;
  const auto& values = world.state(*i).values;
  auto it = values.find(property);
  return it == values.end() ? nullptr : &it->second;
}

bool is_on(const World& world, const char* handle, const char* property) {
  const Value* v = lookup(world, handle, property);
  return v != nullptr && v->is_boolean() && v->as_boolean();
}

bool has_label(const World& world, const char* handle, const char* property, const char* label) {
  const Value* v = lookup(world, handle, property);
  return v != nullptr && v->is_text() && v->as_text() == label;
}

}  // namespace

void EnvironmentState::clamp() {
  smoke_level = officetwin::clamp(smoke_level, 0.0, 1.0);
  wind_speed = officetwin::clamp(wind_speed, 0.0, 100.0);
  humidity_pct = officetwin::clamp(humidity_pct, 0.0, 100.0);
  co2_ppm = officetwin::clamp(co2_ppm, 0.0, 10000.0);
  occupancy = std::max(occupancy, 0);
  daylight = officetwin::clamp(daylight, 0.0, 1.0);
}

bool EnvironmentState::within_bounds() const {
  auto in = [](double x, double lo, double hi) { return std::isfinite(x) && x >= lo && x <= hi; };
  return in(smoke_level, 0, 1) && in(wind_speed, 0, 100) && in(humidity_pct, 0, 100) &&
         in(co2_ppm, 0, 10000) && occupancy >= 0 && in(daylight, 0, 1);
}

nlohmann::ordered_json EnvironmentState::to_json() const {
  return {{"smoke_level", smoke_level}, {"fire_present", fire_present},
          {"wind_speed", wind_speed},   {"humidity_pct", humidity_pct},
          {"co2_ppm", co2_ppm},         {"occupancy", occupancy},
          {"daylight", daylight}};
}

EnvironmentState EnvironmentState::from_json(const nlohmann::json& j) {
  EnvironmentState e;
  e.smoke_level = j.value("smoke_level", e.smoke_level);
  e.fire_present = j.value("fire_present", e.fire_present);
  e.wind_speed = j.value("wind_speed", e.wind_speed);
  e.humidity_pct = j.value("humidity_pct", e.humidity_pct);
  e.co2_ppm = j.value("co2_ppm", e.co2_ppm);
  e.occupancy = j.value("occupancy", e.occupancy);
  e.daylight = j.value("daylight", e.daylight);
  return e;
}

nlohmann::ordered_json EnvironmentConstants::to_json() const {
  return {{"motion_hold", motion_hold},
          {"card_hold", card_hold},
          {"t_extinguish", t_extinguish},
          {"k_decay", k_decay},
          {"k_blower", k_blower},
          {"k_window", k_window},
          {"wind_threshold", wind_threshold},
          {"humidifier_rate", humidifier_rate},
          {"k_humidity", k_humidity},
          {"ambient_humidity", ambient_humidity},
          {"ambient_co2", ambient_co2},
          {"co2_per_person", co2_per_person},
          {"k_co2", k_co2},
          {"k_co2_window", k_co2_window},
          {"smoke_noise", smoke_noise}};
}

void EnvironmentConstants::merge(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::bad_request, "constants must be an object");
  std::pair<const char*, double*> fields[] = {
      {"motion_hold", &motion_hold},       {"card_hold", &card_hold},
      {"t_extinguish", &t_extinguish},     {"k_decay", &k_decay},
      {"k_blower", &k_blower},             {"k_window", &k_window},
      {"wind_threshold", &wind_threshold}, {"humidifier_rate", &humidifier_rate},
      {"k_humidity", &k_humidity},         {"ambient_humidity", &ambient_humidity},
      {"ambient_co2", &ambient_co2},       {"co2_per_person", &co2_per_person},
      {"k_co2", &k_co2},                   {"k_co2_window", &k_co2_window},
      {"smoke_noise", &smoke_noise}};
  for (const auto& [key, value] : j.items()) {
    auto it = std::find_if(std::begin(fields), std::end(fields),
                           [&](const auto& f) { return key == f.first; });
    if (it == std::end(fields)) {
      throw Error(ErrorCode::bad_request, "unknown constant '" + key + "'");
    }
    if (!value.is_number() || value.get<double>() < 0) {
      throw Error(ErrorCode::bad_request, "constant '" + key + "' must be a non-negative number");
    }
    *it->second = value.get<double>();
  }
}

std::string_view stimulus_name(Stimulus::Kind k) {
  switch (k) {
    case Stimulus::Kind::motion_pulse: return "motion_pulse";
    case Stimulus::Kind::card_scan: return "card_scan";
    case Stimulus::Kind::fire_start: return "fire_start";
    case Stimulus::Kind::fire_end: return "fire_end";
    case Stimulus::Kind::wind_set: return "wind_set";
    case Stimulus::Kind::occupancy_set: return "occupancy_set";
    case Stimulus::Kind::smoke_inject: return "smoke_inject";
    case Stimulus::Kind::daylight_set: return "daylight_set";
  }
  return "motion_pulse";
}

void Stimulus::check() const {
  auto bad = [&](const std::string& what) {
    throw Error(ErrorCode::bad_request, std::string(stimulus_name(kind)) + ": " + what);
  };
  if (!std::isfinite(at) || at < 0) bad("'at' must be a non-negative time");
  switch (kind) {
    case Kind::card_scan:
      if (value < 0 || value > 4294967295.0 || value != std::floor(value)) {
        bad("card id must be a non-negative integer");
      }
      break;
    case Kind::wind_set:
      if (!(value >= 0 && value <= 100)) bad("speed must be within [0, 100] m/s");
      break;
    case Kind::occupancy_set:
      if (value < 0 || value > 500 || value != std::floor(value)) bad("count must be within 0..500");
      break;
    case Kind::smoke_inject:
      if (!(value >= 0 && value <= 1)) bad("rate must be within [0, 1] per second");
      if (!(duration >= 0) || !std::isfinite(duration)) bad("duration must be non-negative");
      break;
    case Kind::daylight_set:
      if (!(value >= 0 && value <= 1)) bad("fraction must be within [0, 1]");
      break;
    default:
      break;
  }
}

nlohmann::ordered_json Stimulus::to_json() const {
  nlohmann::ordered_json j{{"at", at}, {"kind", stimulus_name(kind)}};
  switch (kind) {
    case Kind::card_scan: j["card"] = static_cast<std::int64_t>(value); break;
    case Kind::wind_set: j["speed"] = value; break;
    case Kind::occupancy_set: j["count"] = static_cast<int>(value); break;
    case Kind::smoke_inject:
      j["rate"] = value;
      j["duration"] = duration;
      break;
    case Kind::daylight_set: j["fraction"] = value; break;
    default: break;
  }
  return j;
}

Stimulus Stimulus::from_json(const nlohmann::json& j) {
  try {
    Stimulus s;
    s.at = j.value("at", 0.0);
    auto kind = j.at("kind").get<std::string>();
    static const std::pair<const char*, Kind> kinds[] = {
        {"motion_pulse", Kind::motion_pulse},   {"card_scan", Kind::card_scan},
        {"fire_start", Kind::fire_start},       {"fire_end", Kind::fire_end},
        {"wind_set", Kind::wind_set},           {"occupancy_set", Kind::occupancy_set},
        {"smoke_inject", Kind::smoke_inject},   {"daylight_set", Kind::daylight_set}};
    auto it = std::find_if(std::begin(kinds), std::end(kinds),
                           [&](const auto& k) { return kind == k.first; });
    if (it == std::end(kinds)) throw Error(ErrorCode::bad_request, "unknown stimulus '" + kind + "'");
    s.kind = it->second;
    switch (s.kind) {
      case Kind::card_scan: s.value = j.at("card").get<double>(); break;
      case Kind::wind_set: s.value = j.at("speed").get<double>(); break;
      case Kind::occupancy_set: s.value = j.at("count").get<double>(); break;
      case Kind::smoke_inject:
        s.value = j.at("rate").get<double>();
        s.duration = j.at("duration").get<double>();
        break;
      case Kind::daylight_set: s.value = j.at("fraction").get<double>(); break;
      default: break;
    }
    s.check();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::bad_request, std::string("malformed stimulus: ") + e.what(), j.dump());
  }
}

Environment::Environment(EnvironmentConstants constants, std::uint64_t seed)
    : constants_(constants), rng_(seed) {
  state_.humidity_pct = constants_.ambient_humidity;
  state_.co2_ppm = constants_.ambient_co2;
  state_.clamp();
}

void Environment::apply(const Stimulus& s) {
  const SimTime t = state_.sim_time;
  switch (s.kind) {
    case Stimulus::Kind::motion_pulse: motion_until_ = t + constants_.motion_hold; break;
    case Stimulus::Kind::card_scan:
      card_id_ = s.value;
      card_until_ = t + constants_.card_hold;
      break;
    case Stimulus::Kind::fire_start: state_.fire_present = true; break;
    case Stimulus::Kind::fire_end:
      state_.fire_present = false;
      sprinkled_for_ = 0.0;
      break;
    case Stimulus::Kind::wind_set: state_.wind_speed = s.value; break;
    case Stimulus::Kind::occupancy_set: state_.occupancy = static_cast<int>(s.value); break;
    case Stimulus::Kind::smoke_inject:
      injections_.push_back({t, t + s.duration, s.value});
      break;
    case Stimulus::Kind::daylight_set: state_.daylight = s.value; break;
  }
  state_.clamp();
}

double Environment::injection_rate() const {
  double rate = 0.0;
  for (const auto& inj : injections_) {
    if (inj.from <= state_.sim_time && state_.sim_time < inj.until) rate += inj.rate;
  }
  return rate;
}

std::vector<StateChange> Environment::sense(World& world) {
  std::vector<StateChange> out;
  const SimTime t = state_.sim_time;
  auto feed = [&](const char* handle, const char* property, Value v) {
    auto i = world.index_of(handle);
    if (!i || world.catalog()[*i].find_property(property) == nullptr) return;
    if (auto c = world.apply(*i, property, v, Cause::environment(), t)) out.push_back(std::move(*c));
  };

  double smoke = state_.smoke_level;
  if (constants_.smoke_noise > 0) {
    std::normal_distribution<double> jitter(0.0, constants_.smoke_noise);
    smoke = clamp(smoke + jitter(rng_), 0.0, 1.0);
  }
  feed("SmokeDetector", "Level", Value::number(smoke));
  feed("FireMonitor", "FireDetected", Value::boolean(state_.fire_present));
  feed("HumidityMonitor", "Level", Value::number(std::round(state_.humidity_pct * 10.0) / 10.0));
  feed("CO2Monitor", "Level", Value::number(std::round(state_.co2_ppm)));
  feed("MotionDetector", "On", Value::boolean(motion_active()));
  feed("MotionDetector", "Occupancy", Value::number(state_.occupancy));
  feed("WindDetector", "Speed", Value::number(state_.wind_speed));
  if (auto i = world.index_of("Solar")) {
    const auto& d = world.catalog()[*i];
    if (const auto* p = d.find_property("Output")) {
      auto r = d.ratings.find("rated_watts");
      double rated = r != d.ratings.end() ? r->second : p->max;
      feed("Solar", "Output", Value::number(clamp(state_.daylight * rated, p->min, p->max)));
    }
  }
  feed("RFIDReader", "CardID", Value::number(t < card_until_ ? card_id_ : 0.0));
  return out;
}

void Environment::couple_actuators(const World& world, double dt) {
  if (!(dt > 0)) throw Error(ErrorCode::bad_request, "dt must be positive");
  const auto& k = constants_;
  auto& e = state_;

  double s = e.smoke_level;
  double removal = k.k_decay;
  if (has_label(world, "Blower", "Status", "High")) removal += k.k_blower;
  if (is_on(world, "Window", "On")) removal += k.k_window;
  e.smoke_level = s + dt * (injection_rate() - removal * s);

  if (e.fire_present && is_on(world, "FireSprinkler", "Status")) {
    sprinkled_for_ += dt;
    if (sprinkled_for_ >= k.t_extinguish) {
      e.fire_present = false;
      sprinkled_for_ = 0.0;
    }
  } else {
    sprinkled_for_ = 0.0;
  }

  double humidify = is_on(world, "Humidifier", "On") ? k.humidifier_rate : 0.0;
  e.humidity_pct += dt * (humidify - k.k_humidity * (e.humidity_pct - k.ambient_humidity));

  double target = k.ambient_co2 + k.co2_per_person * e.occupancy;
  double rate = k.k_co2 + (is_on(world, "Window", "On") ? k.k_co2_window : 0.0);
  e.co2_ppm += std::min(1.0, dt * rate) * (target - e.co2_ppm);

  std::erase_if(injections_, [&](const Injection& inj) { return inj.until <= e.sim_time; });
  e.clamp();
}

}  // namespace officetwin
