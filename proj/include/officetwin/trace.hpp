#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "officetwin/device.hpp"
#include "officetwin/environment.hpp"

namespace officetwin {

struct TraceHeader {
  std::string scenario;
  std::uint64_t seed = 0;
  double duration = 0.0;
  double timestep = 1.0;

  friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

/// Device inventory line written at t=0 with the default values.
struct DeviceRecord {
  std::string device_id;
  std::string handle;
  std::string kind;
  std::map<std::string, Value> values;

  friend bool operator==(const DeviceRecord&, const DeviceRecord&) = default;
};

struct EnvSnapshot {
  SimTime sim_time = 0.0;
  EnvironmentState env;

  friend bool operator==(const EnvSnapshot&, const EnvSnapshot&) = default;
};

using TraceRecord = std::variant<StateChange, EnvSnapshot>;

/// Append-only run record. JSON-lines on disk:
///   header, one device line per device, change/snapshot lines, end line.
struct SimTrace {
  TraceHeader header;
  std::vector<DeviceRecord> devices;
  std::vector<TraceRecord> records;
  std::optional<EnvSnapshot> end;  // terminal snapshot; set once the run is complete

  std::vector<StateChange> changes() const;

  void write_jsonl(std::ostream& out) const;
  std::string to_jsonl() const;
  void save(const std::filesystem::path& path) const;

  static SimTrace parse_jsonl(std::istream& in);
  static SimTrace load(const std::filesystem::path& path);

  friend bool operator==(const SimTrace&, const SimTrace&) = default;
};

nlohmann::ordered_json record_to_json(const TraceRecord& r,
                                      const std::map<std::string, std::string>& handles = {});

/// Splits a complete trace at time t into [0,t) and [t,end) halves, each complete on its own.
std::pair<SimTrace, SimTrace> split_trace(const SimTrace& trace, SimTime t);

}  // namespace officetwin
