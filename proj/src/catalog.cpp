#include "officetwin/catalog.hpp"

#include <fstream>
#include <set>

#include "officetwin/error.hpp"

namespace officetwin {

namespace {

using W = WritableBy;

DeviceDescriptor make(std::string id, std::string handle, std::string kind, std::string display,
                      std::string segment, std::vector<PropertySchema> props,
                      std::map<std::string, Value> defaults,
                      std::map<std::string, double> ratings = {}) {
  DeviceDescriptor d;
  d.device_id = std::move(id);
  d.handle = std::move(handle);
  d.kind = std::move(kind);
  d.display_name = std::move(display);
  d.segment = std::move(segment);
  d.properties = std::move(props);
  d.defaults = std::move(defaults);
  d.ratings = std::move(ratings);
  return d;
}

Value B(bool b) { return Value::boolean(b); }
Value N(double x) { return Value::number(x); }
Value T(std::string s) { return Value::text(std::move(s)); }

std::string_view kind_name(PropertyKind k) {
  switch (k) {
    case PropertyKind::boolean: return "boolean";
    case PropertyKind::enumeration: return "enumeration";
    case PropertyKind::number: return "number";
  }
  return "boolean";
}

}  // namespace

Catalog builtin_catalog() {
  std::vector<DeviceDescriptor> d;
  d.push_back(make("PTT0810921C", "Fan", "Ceiling Fan", "Fan", "office",
                   {PropertySchema::enumeration("Status", {"Off", "Low", "High"})},
                   {{"Status", T("Off")}}));
  d.push_back(make("PTT0810NGX2", "AC", "AC", "A/C", "office", {PropertySchema::boolean("On")},
                   {{"On", B(false)}}));
  d.push_back(make("PTT08109JCO", "Window", "Window", "Window", "office",
                   {PropertySchema::boolean("On")}, {{"On", B(false)}}));
  d.push_back(make("PTT0810N260", "MotionDetector", "Motion Detector", "Motion Detector", "office",
                   {PropertySchema::boolean("On", W::sensor),
                    PropertySchema::bounded("Occupancy", 0, 500, "people", W::sensor, true)},
                   {{"On", B(false)}, {"Occupancy", N(0)}}));
  d.push_back(make("PTT08107G8Q", "Siren", "Siren", "Siren", "office",
                   {PropertySchema::boolean("On")}, {{"On", B(false)}}));
  d.push_back(make("PTT08109WB5", "SmokeDetector", "Smoke Detector", "Smoke Detector", "office",
                   {PropertySchema::bounded("Level", 0, 1, "")}, {{"Level", N(0)}}));
  d.push_back(make("PTT08101516", "RFIDReader", "RFID Reader", "RFID Reader", "office",
                   {PropertySchema::bounded("CardID", 0, 4294967295.0, "", W::sensor, true),
                    PropertySchema::enumeration("Status", {"Invalid", "Valid"})},
                   {{"CardID", N(0)}, {"Status", T("Invalid")}}));
  d.push_back(make("PTT0810S959", "Door", "Door", "Door", "office",
                   {PropertySchema::enumeration("Lock", {"Lock", "Unlock"})},
                   {{"Lock", T("Lock")}}));
  d.push_back(make("PTT08102ZTN", "Light", "Light", "Light", "office",
                   {PropertySchema::boolean("On")}, {{"On", B(false)}}));
  d.push_back(make("PTT0810DL02", "Garage", "Garage Door", "Garage", "outdoor",
                   {PropertySchema::boolean("Open")}, {{"Open", B(false)}}));
  d.push_back(make("PTT08103T95", "Humidifier", "Humidifier", "Humidifier", "office",
                   {PropertySchema::boolean("On")}, {{"On", B(false)}}));
  d.push_back(make("PTT08104648", "CO2Monitor", "Carbon Monoxide Detector", "CO2 Monitor", "office",
                   {PropertySchema::bounded("Level", 0, 10000, "ppm")}, {{"Level", N(400)}}));
  d.push_back(make("PTT0810K6SJ", "HumidityMonitor", "Humidity Sensor", "Humidity Monitor",
                   "office", {PropertySchema::bounded("Level", 0, 100, "%")}, {{"Level", N(50)}}));
  d.push_back(make("PTT0810NK46", "Speaker", "Home Speaker", "Speaker", "office",
                   {PropertySchema::boolean("On")}, {{"On", B(false)}}));
  d.push_back(make("PTT08102UU3", "Solar", "Solar", "Solar Panel", "outdoor",
                   {PropertySchema::bounded("Output", 0, 300, "W")}, {{"Output", N(0)}},
                   {{"rated_watts", 300}}));
  d.push_back(make("PTT0810L33P", "StreetLamp", "Street Lamp", "Street Lamp", "outdoor",
                   {PropertySchema::boolean("On")}, {{"On", B(false)}}));
  // Devices that only appear in the automation table.
  d.push_back(make("PTT0810W3BC", "Webcam", "Webcam", "Webcam", "office",
                   {PropertySchema::boolean("On")}, {{"On", B(false)}}));
  d.push_back(make("PTT0810F1RM", "FireMonitor", "Fire Monitor", "Fire Monitor", "office",
                   {PropertySchema::boolean("FireDetected", W::sensor)},
                   {{"FireDetected", B(false)}}));
  d.push_back(make("PTT0810SPK1", "FireSprinkler", "Fire Sprinkler", "Fire Sprinkler", "office",
                   {PropertySchema::boolean("Status")}, {{"Status", B(false)}}));
  d.push_back(make("PTT0810BLW2", "Blower", "Blower", "Blower", "office",
                   {PropertySchema::enumeration("Status", {"Off", "Low", "High"})},
                   {{"Status", T("Off")}}));
  d.push_back(make("PTT0810WND7", "WindDetector", "Wind Detector", "Wind Detector", "outdoor",
                   {PropertySchema::bounded("Speed", 0, 100, "m/s")}, {{"Speed", N(0)}}));
  d.push_back(make("PTT0810DRN4", "WaterDrain", "Water Drain", "Water Drain", "office",
                   {PropertySchema::boolean("Status")}, {{"Status", B(false)}}));
  return Catalog(std::move(d));
}

Catalog::Catalog(std::vector<DeviceDescriptor> devices) : devices_(std::move(devices)) {
  std::set<std::string> ids;
  std::set<std::string> handles;
  for (const auto& d : devices_) {
    d.check();
    if (!ids.insert(d.device_id).second) {
      throw Error(ErrorCode::schema, "duplicate device_id " + d.device_id, "device_id");
    }
    if (!handles.insert(d.handle).second) {
      throw Error(ErrorCode::schema, "duplicate handle " + d.handle, "handle");
    }
  }
  for (const auto& d : devices_) {
    if (d.handle != d.device_id && ids.contains(d.handle)) {
      throw Error(ErrorCode::schema, "handle " + d.handle + " collides with a device_id", "handle");
    }
  }
}

std::optional<std::size_t> Catalog::index_of(const std::string& ref) const {
  for (std::size_t i = 0; i < devices_.size(); ++i) {
    if (devices_[i].handle == ref || devices_[i].device_id == ref) return i;
  }
  return std::nullopt;
}

const DeviceDescriptor& Catalog::at(const std::string& ref) const {
  auto i = index_of(ref);
  if (!i) throw Error(ErrorCode::not_found, "unknown device '" + ref + "'");
  return devices_[*i];
}

nlohmann::ordered_json descriptor_to_json(const DeviceDescriptor& d) {
  nlohmann::ordered_json dj;
  dj["device_id"] = d.device_id;
  dj["handle"] = d.handle;
  dj["kind"] = d.kind;
  dj["display_name"] = d.display_name;
  dj["segment"] = d.segment;
  auto props = nlohmann::ordered_json::array();
  for (const auto& p : d.properties) {
    nlohmann::ordered_json pj;
    pj["name"] = p.name;
    pj["kind"] = kind_name(p.kind);
    pj["writable_by"] = p.writable_by == WritableBy::sensor ? "sensor" : "command";
    if (p.kind == PropertyKind::enumeration) pj["values"] = p.labels;
    if (p.kind == PropertyKind::number) {
      pj["min"] = p.min;
      pj["max"] = p.max;
      pj["unit"] = p.unit;
      if (p.integral) pj["integral"] = true;
    }
    props.push_back(std::move(pj));
  }
  dj["properties"] = std::move(props);
  nlohmann::ordered_json defaults = nlohmann::ordered_json::object();
  for (const auto& p : d.properties) defaults[p.name] = d.defaults.at(p.name).to_json();
  dj["defaults"] = std::move(defaults);
  if (!d.ratings.empty()) dj["ratings"] = d.ratings;
  return dj;
}

nlohmann::ordered_json Catalog::to_json() const {
  auto list = nlohmann::ordered_json::array();
  for (const auto& d : devices_) list.push_back(descriptor_to_json(d));
  return {{"devices", std::move(list)}};
}

Catalog Catalog::from_json(const nlohmann::json& j) {
  try {
    std::vector<DeviceDescriptor> devices;
    for (const auto& dj : j.at("devices")) {
      DeviceDescriptor d;
      d.device_id = dj.at("device_id").get<std::string>();
      d.handle = dj.value("handle", d.device_id);
      d.kind = dj.at("kind").get<std::string>();
      d.display_name = dj.value("display_name", d.kind);
      d.segment = dj.value("segment", std::string("office"));
      for (const auto& pj : dj.at("properties")) {
        PropertySchema p;
        p.name = pj.at("name").get<std::string>();
        auto kind = pj.at("kind").get<std::string>();
        if (kind == "boolean") {
          p.kind = PropertyKind::boolean;
        } else if (kind == "enumeration") {
          p.kind = PropertyKind::enumeration;
          p.labels = pj.at("values").get<std::vector<std::string>>();
        } else if (kind == "number") {
          p.kind = PropertyKind::number;
          p.min = pj.at("min").get<double>();
          p.max = pj.at("max").get<double>();
          p.unit = pj.value("unit", std::string());
          p.integral = pj.value("integral", false);
        } else {
          throw Error(ErrorCode::schema, "unknown property kind '" + kind + "'",
                      d.device_id + ".properties." + p.name + ".kind");
        }
        auto w = pj.value("writable_by", std::string("command"));
        if (w != "command" && w != "sensor") {
          throw Error(ErrorCode::schema, "writable_by must be command or sensor",
                      d.device_id + ".properties." + p.name + ".writable_by");
        }
        p.writable_by = w == "sensor" ? WritableBy::sensor : WritableBy::command;
        d.properties.push_back(std::move(p));
      }
      for (const auto& [k, v] : dj.at("defaults").items()) d.defaults[k] = Value::from_json(v);
      if (dj.contains("ratings")) d.ratings = dj.at("ratings").get<std::map<std::string, double>>();
      devices.push_back(std::move(d));
    }
    return Catalog(std::move(devices));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::schema, std::string("malformed catalog: ") + e.what());
  }
}

Catalog Catalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read catalog " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::schema, path.string() + ": " + e.what());
  }
}

}  // namespace officetwin
