#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "officetwin/device.hpp"

namespace officetwin {

/// Ordered device catalog with lookup by serial or handle.
class Catalog {
 public:
  Catalog() = default;
  /// Validates every descriptor and the uniqueness of ids and handles.
  explicit Catalog(std::vector<DeviceDescriptor> devices);

  const std::vector<DeviceDescriptor>& devices() const noexcept { return devices_; }
  std::size_t size() const noexcept { return devices_.size(); }

  /// Resolves a device reference (handle or device_id).
  std::optional<std::size_t> index_of(const std::string& ref) const;
  const DeviceDescriptor& at(const std::string& ref) const;
  const DeviceDescriptor& operator[](std::size_t i) const { return devices_[i]; }

  nlohmann::ordered_json to_json() const;
  static Catalog from_json(const nlohmann::json& j);
  static Catalog load(const std::filesystem::path& path);

  friend bool operator==(const Catalog&, const Catalog&) = default;

 private:
  std::vector<DeviceDescriptor> devices_;
};

/// The sixteen office devices plus the six extra devices named by the automation table.
Catalog builtin_catalog();

nlohmann::ordered_json descriptor_to_json(const DeviceDescriptor& d);

}  // namespace officetwin
