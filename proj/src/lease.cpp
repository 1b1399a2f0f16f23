#include "officetwin/lease.hpp"

#include <arpa/inet.h>

#include "officetwin/error.hpp"

namespace officetwin {

std::optional<std::uint32_t> parse_ipv4(const std::string& text) {
  in_addr a{};
  if (inet_pton(AF_INET, text.c_str(), &a) != 1) return std::nullopt;
  return ntohl(a.s_addr);
}

std::string format_ipv4(std::uint32_t address) {
  in_addr a{};
  a.s_addr = htonl(address);
  char buf[INET_ADDRSTRLEN];
  inet_ntop(AF_INET, &a, buf, sizeof buf);
  return buf;
}

namespace {

std::uint32_t must_parse(const std::string& text, const char* what) {
  auto a = parse_ipv4(text);
  if (!a) throw Error(ErrorCode::configuration, std::string("invalid ") + what + " address '" + text + "'");
  return *a;
}

}  // namespace

LeasePool::LeasePool(const std::string& first, const std::string& last, const std::string& gateway)
    : first_(must_parse(first, "pool start")),
      last_(must_parse(last, "pool end")),
      gateway_text_(gateway) {
  auto gw = must_parse(gateway, "gateway");
  if (last_ < first_) throw Error(ErrorCode::configuration, "pool end precedes pool start");
  if (gw >= first_ && gw <= last_) {
    throw Error(ErrorCode::configuration, "gateway address " + gateway + " lies inside the pool");
  }
}

AddressLease LeasePool::register_device(const DeviceDescriptor& device, SimTime now) {
  std::lock_guard lock(mutex_);
  if (auto it = by_device_.find(device.device_id); it != by_device_.end()) {
    return by_address_.at(it->second);
  }
  std::uint32_t a = first_;
  for (const auto& [used, lease] : by_address_) {
    if (used != a) break;
    if (a == last_) break;
    ++a;
  }
  if (by_address_.contains(a) || by_address_.size() >= capacity()) {
    throw Error(ErrorCode::capacity,
                "address pool exhausted (" + std::to_string(capacity()) + " leases)", device.device_id);
  }
  AddressLease lease{device.device_id, format_ipv4(a), now, device.segment};
  by_address_.emplace(a, lease);
  by_device_.emplace(device.device_id, a);
  return lease;
}

AddressLease LeasePool::register_device(const Catalog& catalog, const std::string& ref, SimTime now) {
  auto i = catalog.index_of(ref);
  if (!i) throw Error(ErrorCode::not_found, "unknown device '" + ref + "'", ref);
  return register_device(catalog[*i], now);
}

bool LeasePool::release(const std::string& device_id) {
  std::lock_guard lock(mutex_);
  auto it = by_device_.find(device_id);
  if (it == by_device_.end()) return false;
  by_address_.erase(it->second);
  by_device_.erase(it);
  return true;
}

std::optional<AddressLease> LeasePool::find(const std::string& device_id) const {
  std::lock_guard lock(mutex_);
  auto it = by_device_.find(device_id);
  if (it == by_device_.end()) return std::nullopt;
  return by_address_.at(it->second);
}

std::vector<AddressLease> LeasePool::leases() const {
  std::lock_guard lock(mutex_);
  std::vector<AddressLease> out;
  for (const auto& [a, lease] : by_address_) out.push_back(lease);
  return out;
}

nlohmann::ordered_json LeasePool::to_json() const {
  auto list = nlohmann::ordered_json::array();
  for (const auto& l : leases()) {
    list.push_back({{"device_id", l.device_id},
                    {"address", l.address},
                    {"issued_at", l.issued_at},
                    {"segment", l.segment}});
  }
  return list;
}

void LeasePool::restore(const nlohmann::json& j) {
  std::map<std::uint32_t, AddressLease> by_address;
  std::map<std::string, std::uint32_t> by_device;
  try {
    for (const auto& lj : j) {
      AddressLease l{lj.at("device_id").get<std::string>(), lj.at("address").get<std::string>(),
                     lj.value("issued_at", 0.0), lj.value("segment", std::string())};
      auto a = parse_ipv4(l.address);
      if (!a || *a < first_ || *a > last_) {
        throw Error(ErrorCode::schema, "lease address " + l.address + " is outside the pool");
      }
      if (!by_device.emplace(l.device_id, *a).second || !by_address.emplace(*a, l).second) {
        throw Error(ErrorCode::schema, "duplicate lease for " + l.device_id + " / " + l.address);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::schema, std::string("malformed leases: ") + e.what());
  }
  std::lock_guard lock(mutex_);
  by_address_ = std::move(by_address);
  by_device_ = std::move(by_device);
}

}  // namespace officetwin
