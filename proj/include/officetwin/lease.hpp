#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "officetwin/catalog.hpp"

namespace officetwin {

struct AddressLease {
  std::string device_id;
  std::string address;
  SimTime issued_at = 0.0;
  std::string segment;

  friend bool operator==(const AddressLease&, const AddressLease&) = default;
};

/// Sequential address pool for registered devices. Thread-safe.
class LeasePool {
 public:
  /// Throws Error(configuration) for an unparsable or inverted range, or when
  /// the gateway address lies inside the pool.
  LeasePool(const std::string& first = "192.168.25.100", const std::string& last = "192.168.25.249",
            const std::string& gateway = "192.168.25.1");

  /// Lowest free address; re-registering returns the existing lease.
  /// Throws Error(capacity) when the pool is exhausted.
  AddressLease register_device(const DeviceDescriptor& device, SimTime now = 0.0);
  /// Throws Error(not_found) for a reference the catalog does not know.
  AddressLease register_device(const Catalog& catalog, const std::string& ref, SimTime now = 0.0);
  bool release(const std::string& device_id);

  std::optional<AddressLease> find(const std::string& device_id) const;
  /// Ordered by address.
  std::vector<AddressLease> leases() const;
  std::size_t capacity() const noexcept { return last_ - first_ + 1; }
  const std::string& gateway() const noexcept { return gateway_text_; }

  nlohmann::ordered_json to_json() const;
  /// Restores leases, dropping none; throws Error(schema) on duplicates or
  /// addresses outside the pool.
  void restore(const nlohmann::json& j);

 private:
  mutable std::mutex mutex_;
  std::uint32_t first_;
  std::uint32_t last_;
  std::string gateway_text_;
  std::map<std::uint32_t, AddressLease> by_address_;
  std::map<std::string, std::uint32_t> by_device_;
};

std::optional<std::uint32_t> parse_ipv4(const std::string& text);
std::string format_ipv4(std::uint32_t address);

}  // namespace officetwin
