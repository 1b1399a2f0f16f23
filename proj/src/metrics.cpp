#include "officetwin/metrics.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "officetwin/error.hpp"

namespace officetwin {

namespace {

using Ratings = std::map<std::string, std::map<std::string, double>>;

void check_ratings(const std::string& kind, const Ratings& r, const char* what) {
  for (const auto& [prop, by_value] : r) {
    for (const auto& [value, x] : by_value) {
      if (!(x >= 0) || !std::isfinite(x)) {
        throw Error(ErrorCode::schema, kind + ": " + what + " for " + prop + "=" + value +
                                           " must be non-negative");
      }
    }
  }
}

}  // namespace

void PowerProfile::check() const {
  for (const auto& [kind, p] : kinds) {
    check_ratings(kind, p.draw_watts, "draw_watts");
    check_ratings(kind, p.flow_lpm, "flow_lpm");
    if (!(p.rated_watts >= 0)) throw Error(ErrorCode::schema, kind + ": rated_watts must be non-negative");
  }
}

nlohmann::ordered_json PowerProfile::to_json() const {
  nlohmann::ordered_json kinds_json = nlohmann::ordered_json::object();
  for (const auto& [kind, p] : kinds) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    if (p.comfort) j["comfort"] = true;
    if (!p.draw_watts.empty()) j["draw_watts"] = p.draw_watts;
    if (!p.flow_lpm.empty()) j["flow_lpm"] = p.flow_lpm;
    if (!p.generation_property.empty()) j["generation_property"] = p.generation_property;
    if (p.rated_watts > 0) j["rated_watts"] = p.rated_watts;
    kinds_json[kind] = std::move(j);
  }
  return {{"kinds", kinds_json}};
}

PowerProfile PowerProfile::from_json(const nlohmann::json& j) {
  try {
    PowerProfile profile;
    for (const auto& [kind, pj] : j.at("kinds").items()) {
      KindProfile p;
      p.comfort = pj.value("comfort", false);
      if (pj.contains("draw_watts")) p.draw_watts = pj.at("draw_watts").get<Ratings>();
      if (pj.contains("flow_lpm")) p.flow_lpm = pj.at("flow_lpm").get<Ratings>();
      p.generation_property = pj.value("generation_property", std::string());
      p.rated_watts = pj.value("rated_watts", 0.0);
      profile.kinds.emplace(kind, std::move(p));
    }
    profile.check();
    return profile;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::schema, std::string("malformed profile: ") + e.what());
  }
}

PowerProfile PowerProfile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read profile " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::schema, path.string() + ": " + e.what());
  }
}

PowerProfile default_profile() {
  PowerProfile p;
  auto on = [](double w) { return Ratings{{"On", {{"true", w}}}}; };
  auto& k = p.kinds;
  k["Ceiling Fan"] = {true, {{"Status", {{"Low", 30}, {"High", 60}}}}, {}, {}, 0};
  k["AC"] = {true, on(1500), {}, {}, 0};
  k["Light"] = {true, on(10), {}, {}, 0};
  k["Street Lamp"] = {true, on(50), {}, {}, 0};
  k["Siren"] = {false, on(5), {}, {}, 0};
  k["Webcam"] = {false, on(4), {}, {}, 0};
  k["Humidifier"] = {false, on(30), {}, {}, 0};
  k["Blower"] = {false, {{"Status", {{"Low", 100}, {"High", 200}}}}, {}, {}, 0};
  k["Fire Sprinkler"] = {false, {}, {{"Status", {{"true", 20}}}}, {}, 0};
  k["Solar"] = {false, {}, {}, "Output", 300};
  for (const char* passive : {"Window", "Motion Detector", "Smoke Detector", "RFID Reader", "Door",
                              "Garage Door", "Carbon Monoxide Detector", "Humidity Sensor",
                              "Home Speaker", "Fire Monitor", "Wind Detector", "Water Drain"}) {
    k[passive] = {};
  }
  return p;
}

nlohmann::ordered_json ResourceLedger::to_json() const {
  auto list = nlohmann::ordered_json::array();
  for (const auto& d : devices) {
    list.push_back({{"device", d.device_id},
                    {"kind", d.kind},
                    {"comfort", d.comfort},
                    {"energy_wh", d.energy_wh},
                    {"water_l", d.water_l},
                    {"generated_wh", d.generated_wh},
                    {"on_seconds", d.on_seconds},
                    {"unoccupied_on_seconds", d.unoccupied_on_seconds}});
  }
  return {{"duration", duration},
          {"energy_wh", energy_wh},
          {"comfort_energy_wh", comfort_energy_wh},
          {"water_l", water_l},
          {"generated_wh", generated_wh},
          {"occupied_seconds", occupied_seconds},
          {"unoccupied_on_seconds", unoccupied_on_seconds},
          {"devices", list}};
}

ResourceLedger accumulate(const SimTrace& trace, const PowerProfile& profile) {
  if (!trace.end) throw Error(ErrorCode::bad_request, "trace is incomplete (no end record)");

  std::set<std::string> missing;
  for (const auto& d : trace.devices) {
    if (!profile.kinds.contains(d.kind)) missing.insert(d.kind);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& k : missing) list += (list.empty() ? "" : ", ") + k;
    throw Error(ErrorCode::configuration, "profile has no entry for device kind: " + list, list);
  }

  struct Running {
    const KindProfile* profile;
    std::map<std::string, Value> values;
    // seconds spent per (property, value) that carries a rating
    std::map<std::pair<std::string, std::string>, double> rated_seconds;
    std::map<double, double> generation_seconds;  // seconds per output level
    double on_seconds = 0.0;
    double unoccupied_on_seconds = 0.0;
  };
  std::vector<Running> devices;
  std::map<std::string, std::size_t> index;
  std::optional<std::size_t> occupancy_device;
  for (const auto& d : trace.devices) {
    index[d.device_id] = devices.size();
    if (!occupancy_device && d.values.contains("Occupancy")) occupancy_device = devices.size();
    devices.push_back({&profile.kinds.at(d.kind), d.values, {}, {}, 0.0, 0.0});
  }

  ResourceLedger ledger;
  ledger.duration = trace.end->sim_time;

  auto integrate = [&](double dt) {
    if (dt <= 0) return;
    bool occupied = false;
    if (occupancy_device) {
      const auto& v = devices[*occupancy_device].values.at("Occupancy");
      occupied = v.is_number() && v.as_number() > 0;
    }
    if (occupied) ledger.occupied_seconds += dt;
    for (auto& d : devices) {
      bool on = false;
      for (const auto* ratings : {&d.profile->draw_watts, &d.profile->flow_lpm}) {
        for (const auto& [prop, by_value] : *ratings) {
          auto v = d.values.find(prop);
          if (v == d.values.end()) continue;
          auto key = v->second.to_string();
          auto x = by_value.find(key);
          if (x == by_value.end()) continue;
          d.rated_seconds[{prop, key}] += dt;
          if (x->second > 0) on = true;
        }
      }
      if (on) {
        d.on_seconds += dt;
        if (d.profile->comfort && !occupied) d.unoccupied_on_seconds += dt;
      }
      if (!d.profile->generation_property.empty()) {
        auto v = d.values.find(d.profile->generation_property);
        if (v != d.values.end() && v->second.is_number()) d.generation_seconds[v->second.as_number()] += dt;
      }
    }
  };

  SimTime last = 0.0;
  for (const auto& r : trace.records) {
    const auto* c = std::get_if<StateChange>(&r);
    if (c == nullptr) continue;
    integrate(c->sim_time - last);
    last = std::max(last, c->sim_time);
    auto it = index.find(c->device_id);
    if (it == index.end()) {
      throw Error(ErrorCode::bad_request, "trace changes undeclared device " + c->device_id);
    }
    devices[it->second].values[c->property] = c->new_value;
  }
  integrate(trace.end->sim_time - last);

  for (std::size_t i = 0; i < devices.size(); ++i) {
    const auto& run = devices[i];
    DeviceLedger d;
    d.device_id = trace.devices[i].device_id;
    d.kind = trace.devices[i].kind;
    d.comfort = run.profile->comfort;
    for (const auto& [key, seconds] : run.rated_seconds) {
      const auto& [prop, value] = key;
      if (auto p = run.profile->draw_watts.find(prop); p != run.profile->draw_watts.end()) {
        if (auto w = p->second.find(value); w != p->second.end()) d.energy_wh += seconds * w->second / 3600.0;
      }
      if (auto p = run.profile->flow_lpm.find(prop); p != run.profile->flow_lpm.end()) {
        if (auto f = p->second.find(value); f != p->second.end()) d.water_l += seconds * f->second / 60.0;
      }
    }
    for (const auto& [watts, seconds] : run.generation_seconds) d.generated_wh += watts * seconds / 3600.0;
    d.on_seconds = run.on_seconds;
    d.unoccupied_on_seconds = run.unoccupied_on_seconds;
    ledger.energy_wh += d.energy_wh;
    if (d.comfort) ledger.comfort_energy_wh += d.energy_wh;
    ledger.water_l += d.water_l;
    ledger.generated_wh += d.generated_wh;
    ledger.unoccupied_on_seconds += d.unoccupied_on_seconds;
    ledger.devices.push_back(std::move(d));
  }
  return ledger;
}

Scenario baseline_transform(const Scenario& scenario) {
  Scenario out = scenario;
  out.name = scenario.name + "-baseline";
  HoldPolicy policy;
  policy.window = scenario.work_window;
  policy.hold = {{"Fan", "Status", Value::text("High")},
                 {"Light", "On", Value::boolean(true)},
                 {"AC", "On", Value::boolean(true)},
                 {"StreetLamp", "On", Value::boolean(true)}};
  if (policy.window.to > policy.window.from) {
    out.policy = std::move(policy);
  } else {
    out.policy.reset();
  }
  return out;
}

std::optional<double> relative_change(double baseline, double automated) {
  if (!(baseline > 0)) return std::nullopt;
  return (automated - baseline) / baseline;
}

double resource_index(const ResourceLedger& ledger) {
  return ledger.energy_wh / 1000.0 + ledger.water_l / 100.0;
}

const SdgIndicator* SdgReport::find(const std::string& target, const std::string& indicator) const {
  for (const auto& r : rows) {
    if (r.target == target && (indicator.empty() || r.indicator == indicator)) return &r;
  }
  return nullptr;
}

SdgReport sdg_report(const ResourceLedger& automated, const ResourceLedger& baseline) {
  if (std::fabs(automated.duration - baseline.duration) > 1e-9) {
    throw Error(ErrorCode::comparability,
                "ledgers cover different durations (" + format_number(automated.duration) +
                    " s vs " + format_number(baseline.duration) + " s)");
  }
  SdgReport report;
  auto row = [&](std::string target, std::string indicator, std::string unit, double b, double a,
                 std::string note = {}) {
    report.rows.push_back(
        {std::move(target), std::move(indicator), std::move(unit), b, a, relative_change(b, a), std::move(note)});
  };
  auto flag = [&](std::string target, std::string indicator, std::string note) {
    report.rows.push_back({std::move(target), std::move(indicator), "flag", std::nullopt,
                           std::nullopt, std::nullopt, std::move(note)});
  };
  auto share = [](const ResourceLedger& l) {
    return l.energy_wh > 0 ? l.generated_wh / l.energy_wh : 0.0;
  };
  auto import_kwh = [](const ResourceLedger& l) {
    return std::max(l.energy_wh - l.generated_wh, 0.0) / 1000.0;
  };
  auto export_kwh = [](const ResourceLedger& l) {
    return std::max(l.generated_wh - l.energy_wh, 0.0) / 1000.0;
  };

  row("6.4", "water use", "L", baseline.water_l, automated.water_l);
  row("7.1", "solar share of consumption", "ratio", share(baseline), share(automated));
  row("7.3", "energy consumed", "kWh", baseline.energy_wh / 1000.0, automated.energy_wh / 1000.0);
  row("7b", "solar share of consumption", "ratio", share(baseline), share(automated));
  row("8.4", "energy consumed", "kWh", baseline.energy_wh / 1000.0, automated.energy_wh / 1000.0);
  flag("9.4", "automated control", "rule engine drives actuators from sensor readings");
  flag("9.5", "per-device metering", "every actuator state change is recorded and metered");
  row("11.6", "net grid import", "kWh", import_kwh(baseline), import_kwh(automated));
  row("11.6", "grid export", "kWh", export_kwh(baseline), export_kwh(automated));
  row("12.2", "resource index", "points", resource_index(baseline), resource_index(automated),
      "1 point per kWh + 1 point per 100 L");
  row("12.5", "waste hours", "h", baseline.unoccupied_on_seconds / 3600.0,
      automated.unoccupied_on_seconds / 3600.0, "comfort loads on while unoccupied");
  flag("13.b", "climate monitoring", "environment sensing and resource reporting available");
  return report;
}

nlohmann::ordered_json SdgReport::to_json() const {
  auto list = nlohmann::ordered_json::array();
  auto opt = [](const std::optional<double>& x) -> nlohmann::ordered_json {
    if (x) return *x;
    return nullptr;
  };
  for (const auto& r : rows) {
    nlohmann::ordered_json j{{"target", r.target},       {"indicator", r.indicator},
                             {"unit", r.unit},           {"baseline", opt(r.baseline)},
                             {"automated", opt(r.automated)},
                             {"relative_change", opt(r.relative_change)}};
    if (!r.note.empty()) j["note"] = r.note;
    list.push_back(std::move(j));
  }
  return {{"indicators", list}};
}

std::string SdgReport::to_table() const {
  auto num = [](const std::optional<double>& x, int precision) {
    if (!x) return std::string("-");
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(precision) << *x;
    return ss.str();
  };
  auto pct = [](const std::optional<double>& x) {
    if (!x) return std::string("undefined");
    std::ostringstream ss;
    ss << std::showpos << std::fixed << std::setprecision(1) << *x * 100.0 << "%";
    return ss.str();
  };
  std::vector<std::vector<std::string>> cells{
      {"Target", "Indicator", "Unit", "Baseline", "Automated", "Change"}};
  for (const auto& r : rows) {
    bool flag = r.unit == "flag";
    cells.push_back({r.target, r.indicator, flag ? "" : r.unit, flag ? "" : num(r.baseline, 3),
                     flag ? "active" : num(r.automated, 3), flag ? "" : pct(r.relative_change)});
  }
  std::vector<std::size_t> width(cells[0].size(), 0);
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream out;
  for (std::size_t n = 0; n < cells.size(); ++n) {
    const auto& row = cells[n];
    for (std::size_t i = 0; i < row.size(); ++i) {
      bool numeric = i >= 3;
      out << (i ? "  " : "");
      if (numeric) {
        out << std::setw(static_cast<int>(width[i])) << std::right << row[i];
      } else {
        out << std::setw(static_cast<int>(width[i])) << std::left << row[i];
      }
    }
    out << '\n';
    if (n == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      out << std::string(total - 2, '-') << '\n';
    }
  }
  return out.str();
}

}  // namespace officetwin
