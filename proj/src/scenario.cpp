#include "officetwin/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "officetwin/error.hpp"

namespace officetwin {

namespace {

nlohmann::ordered_json assignment_json(const PropertyAssignment& a) {
  return {{"device", a.device}, {"property", a.property}, {"value", a.value.to_json()}};
}

PropertyAssignment assignment_from(const nlohmann::json& j) {
  return {j.at("device").get<std::string>(), j.at("property").get<std::string>(),
          Value::from_json(j.at("value"))};
}

TimeWindow window_from(const nlohmann::json& j) {
  return {j.at("from").get<double>(), j.at("to").get<double>()};
}

nlohmann::ordered_json window_json(const TimeWindow& w) { return {{"from", w.from}, {"to", w.to}}; }

}  // namespace

void Scenario::check() const {
  if (!(timestep > 0) || !std::isfinite(timestep)) {
    throw Error(ErrorCode::bad_request, "timestep must be positive");
  }
  if (!(duration >= 0) || !std::isfinite(duration)) {
    throw Error(ErrorCode::bad_request, "duration must be non-negative");
  }
  if (snapshot_every < 0) throw Error(ErrorCode::bad_request, "snapshot_every must be non-negative");
  if (!(command_hold >= 0) || !std::isfinite(command_hold)) {
    throw Error(ErrorCode::bad_request, "command_hold must be non-negative");
  }
  for (const auto& s : stimuli) s.check();
  if (!std::is_sorted(stimuli.begin(), stimuli.end(),
                      [](const Stimulus& a, const Stimulus& b) { return a.at < b.at; })) {
    throw Error(ErrorCode::bad_request, "stimuli must be sorted by time");
  }
  if (work_window.to < work_window.from) {
    throw Error(ErrorCode::bad_request, "work_window ends before it starts");
  }
  if (policy && policy->window.to < policy->window.from) {
    throw Error(ErrorCode::bad_request, "policy window ends before it starts");
  }
}

nlohmann::ordered_json Scenario::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["seed"] = seed;
  j["duration"] = duration;
  j["timestep"] = timestep;
  j["snapshot_every"] = snapshot_every;
  j["command_hold"] = command_hold;
  if (!rules_path.empty()) j["rules"] = rules_path;
  if (!catalog_path.empty()) j["catalog"] = catalog_path;
  j["work_window"] = window_json(work_window);

  nlohmann::ordered_json overrides = nlohmann::ordered_json::object();
  auto defaults = EnvironmentConstants{}.to_json();
  auto current = constants.to_json();
  for (const auto& [k, v] : current.items()) {
    if (v != defaults[k]) overrides[k] = v;
  }
  j["constants"] = overrides;

  auto init = nlohmann::ordered_json::array();
  for (const auto& a : initial) init.push_back(assignment_json(a));
  j["initial"] = init;
  auto st = nlohmann::ordered_json::array();
  for (const auto& s : stimuli) st.push_back(s.to_json());
  j["stimuli"] = st;
  if (policy) {
    auto hold = nlohmann::ordered_json::array();
    for (const auto& a : policy->hold) hold.push_back(assignment_json(a));
    j["policy"] = {{"window", window_json(policy->window)}, {"hold", hold}};
  }
  return j;
}

Scenario Scenario::from_json(const nlohmann::json& j) {
  try {
    Scenario s;
    s.name = j.value("name", std::string("scenario"));
    s.seed = j.value("seed", std::uint64_t{0});
    s.duration = j.at("duration").get<double>();
    s.timestep = j.value("timestep", 1.0);
    s.snapshot_every = j.value("snapshot_every", s.snapshot_every);
    s.command_hold = j.value("command_hold", s.command_hold);
    s.rules_path = j.value("rules", std::string());
    s.catalog_path = j.value("catalog", std::string());
    if (j.contains("work_window")) s.work_window = window_from(j.at("work_window"));
    if (j.contains("constants")) s.constants.merge(j.at("constants"));
    if (j.contains("initial")) {
      for (const auto& a : j.at("initial")) s.initial.push_back(assignment_from(a));
    }
    if (j.contains("stimuli")) {
      for (const auto& st : j.at("stimuli")) s.stimuli.push_back(Stimulus::from_json(st));
    }
    std::stable_sort(s.stimuli.begin(), s.stimuli.end(),
                     [](const Stimulus& a, const Stimulus& b) { return a.at < b.at; });
    if (j.contains("policy")) {
      HoldPolicy p;
      p.window = window_from(j.at("policy").at("window"));
      for (const auto& a : j.at("policy").at("hold")) p.hold.push_back(assignment_from(a));
      s.policy = std::move(p);
    }
    s.check();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::bad_request, std::string("malformed scenario: ") + e.what());
  }
}

Scenario Scenario::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read scenario " + path.string());
  Scenario s;
  try {
    s = from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::bad_request, path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
  auto base = path.parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).lexically_normal().string();
  };
  resolve(s.rules_path);
  resolve(s.catalog_path);
  return s;
}

void Scenario::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write scenario " + path.string());
  // loaded paths are relative to the working directory; stored ones to the file
  Scenario copy = *this;
  auto dir = std::filesystem::absolute(path).parent_path();
  auto rebase = [&](std::string& p) {
    if (p.empty()) return;
    auto rel = std::filesystem::absolute(p).lexically_normal().lexically_relative(dir);
    if (!rel.empty()) p = rel.string();
  };
  rebase(copy.rules_path);
  rebase(copy.catalog_path);
  out << copy.to_json().dump(2) << '\n';
}

}  // namespace officetwin
