#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "officetwin/catalog.hpp"
#include "officetwin/device.hpp"

namespace officetwin {

/// Live state of every catalog device, indexed like the catalog.
class World {
 public:
  explicit World(std::shared_ptr<const Catalog> catalog);

  const Catalog& catalog() const noexcept { return *catalog_; }
  std::shared_ptr<const Catalog> catalog_ptr() const noexcept { return catalog_; }
  const std::vector<DeviceState>& states() const noexcept { return states_; }
  const DeviceState& state(std::size_t i) const { return states_.at(i); }

  std::optional<std::size_t> index_of(const std::string& ref) const { return catalog_->index_of(ref); }
  const Value& get(const std::string& device_ref, const std::string& property) const;
  const Value& get(std::size_t device, const std::string& property) const {
    return states_.at(device).at(property);
  }

  std::optional<StateChange> apply(std::size_t device, const std::string& property,
                                   const Value& value, const Cause& cause, SimTime t);
  std::optional<StateChange> apply(const std::string& device_ref, const std::string& property,
                                   const Value& value, const Cause& cause, SimTime t);

  /// Value equality over all device states (last_changed ignored).
  bool same_values(const World& other) const;

 private:
  std::shared_ptr<const Catalog> catalog_;
  std::vector<DeviceState> states_;
};

}  // namespace officetwin
