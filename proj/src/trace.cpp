#include "officetwin/trace.hpp"

#include <fstream>
#include <sstream>

#include "officetwin/error.hpp"

namespace officetwin {

std::vector<StateChange> SimTrace::changes() const {
  std::vector<StateChange> out;
  for (const auto& r : records) {
    if (const auto* c = std::get_if<StateChange>(&r)) out.push_back(*c);
  }
  return out;
}

nlohmann::ordered_json record_to_json(const TraceRecord& r,
                                      const std::map<std::string, std::string>& handles) {
  if (const auto* c = std::get_if<StateChange>(&r)) {
    nlohmann::ordered_json j;
    j["type"] = "change";
    j["t"] = c->sim_time;
    j["device"] = c->device_id;
    if (auto it = handles.find(c->device_id); it != handles.end()) j["handle"] = it->second;
    j["property"] = c->property;
    j["old"] = c->old_value.to_json();
    j["new"] = c->new_value.to_json();
    j["cause"] = cause_name(c->cause.kind);
    if (!c->cause.source.empty()) j["source"] = c->cause.source;
    return j;
  }
  const auto& s = std::get<EnvSnapshot>(r);
  return {{"type", "snapshot"}, {"t", s.sim_time}, {"env", s.env.to_json()}};
}

void SimTrace::write_jsonl(std::ostream& out) const {
  nlohmann::ordered_json h{{"type", "header"},
                           {"scenario", header.scenario},
                           {"seed", header.seed},
                           {"duration", header.duration},
                           {"timestep", header.timestep}};
  out << h.dump() << '\n';
  std::map<std::string, std::string> handles;
  for (const auto& d : devices) {
    handles[d.device_id] = d.handle;
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
    for (const auto& [k, v] : d.values) values[k] = v.to_json();
    nlohmann::ordered_json j{{"type", "device"}, {"t", 0.0},       {"device", d.device_id},
                             {"handle", d.handle}, {"kind", d.kind}, {"values", values}};
    out << j.dump() << '\n';
  }
  for (const auto& r : records) out << record_to_json(r, handles).dump() << '\n';
  if (end) {
    nlohmann::ordered_json j{{"type", "end"}, {"t", end->sim_time}, {"env", end->env.to_json()}};
    out << j.dump() << '\n';
  }
}

std::string SimTrace::to_jsonl() const {
  std::ostringstream ss;
  write_jsonl(ss);
  return ss.str();
}

void SimTrace::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write trace " + path.string());
  write_jsonl(out);
  if (!out) throw Error(ErrorCode::io, "failed writing trace " + path.string());
}

namespace {

// the environment's own clock is not written out; it always equals the record time
EnvSnapshot snapshot_from(const nlohmann::json& j) {
  EnvSnapshot snap{j.at("t").get<double>(), EnvironmentState::from_json(j.at("env"))};
  snap.env.sim_time = snap.sim_time;
  return snap;
}

}  // namespace

SimTrace SimTrace::parse_jsonl(std::istream& in) {
  SimTrace trace;
  std::string line;
  std::size_t line_number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      auto type = j.at("type").get<std::string>();
      if (type == "header") {
        trace.header.scenario = j.value("scenario", std::string());
        trace.header.seed = j.value("seed", std::uint64_t{0});
        trace.header.duration = j.value("duration", 0.0);
        trace.header.timestep = j.value("timestep", 1.0);
        have_header = true;
      } else if (type == "device") {
        DeviceRecord d;
        d.device_id = j.at("device").get<std::string>();
        d.handle = j.value("handle", d.device_id);
        d.kind = j.at("kind").get<std::string>();
        for (const auto& [k, v] : j.at("values").items()) d.values[k] = Value::from_json(v);
        trace.devices.push_back(std::move(d));
      } else if (type == "change") {
        StateChange c;
        c.sim_time = j.at("t").get<double>();
        c.device_id = j.at("device").get<std::string>();
        c.property = j.at("property").get<std::string>();
        c.old_value = Value::from_json(j.at("old"));
        c.new_value = Value::from_json(j.at("new"));
        c.cause.kind = parse_cause_kind(j.at("cause").get<std::string>());
        c.cause.source = j.value("source", std::string());
        trace.records.emplace_back(std::move(c));
      } else if (type == "snapshot") {
        trace.records.emplace_back(snapshot_from(j));
      } else if (type == "end") {
        trace.end = snapshot_from(j);
      } else {
        throw Error(ErrorCode::bad_request, "unknown record type '" + type + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::bad_request,
                  "trace line " + std::to_string(line_number) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "trace line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  if (!have_header) throw Error(ErrorCode::bad_request, "trace has no header line");
  return trace;
}

SimTrace SimTrace::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read trace " + path.string());
  try {
    return parse_jsonl(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

namespace {

SimTime record_time(const TraceRecord& r) {
  if (const auto* c = std::get_if<StateChange>(&r)) return c->sim_time;
  return std::get<EnvSnapshot>(r).sim_time;
}

}  // namespace

std::pair<SimTrace, SimTrace> split_trace(const SimTrace& trace, SimTime t) {
  if (!trace.end) throw Error(ErrorCode::bad_request, "cannot split an incomplete trace");
  if (t < 0 || t > trace.end->sim_time) throw Error(ErrorCode::bad_request, "split point outside trace");

  SimTrace first;
  SimTrace second;
  first.header = trace.header;
  first.header.duration = t;
  second.header = trace.header;
  second.header.duration = trace.header.duration - t;
  first.devices = trace.devices;

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < trace.devices.size(); ++i) index[trace.devices[i].device_id] = i;
  auto running = trace.devices;

  EnvironmentState env_at_split{};
  bool have_env = false;
  for (const auto& r : trace.records) {
    if (record_time(r) < t) {
      first.records.push_back(r);
      if (const auto* c = std::get_if<StateChange>(&r)) {
        running.at(index.at(c->device_id)).values[c->property] = c->new_value;
      } else {
        env_at_split = std::get<EnvSnapshot>(r).env;
        have_env = true;
      }
    } else {
      auto shifted = r;
      if (auto* c = std::get_if<StateChange>(&shifted)) {
        c->sim_time -= t;
      } else {
        auto& snap = std::get<EnvSnapshot>(shifted);
        snap.sim_time -= t;
        snap.env.sim_time = snap.sim_time;
      }
      second.records.push_back(std::move(shifted));
    }
  }
  if (!have_env) env_at_split = trace.end->env;
  env_at_split.sim_time = t;
  first.end = EnvSnapshot{t, env_at_split};
  second.devices = std::move(running);
  second.end = EnvSnapshot{trace.end->sim_time - t, trace.end->env};
  second.end->env.sim_time = second.end->sim_time;
  return {std::move(first), std::move(second)};
}

}  // namespace officetwin
