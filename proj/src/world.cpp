#include "officetwin/world.hpp"

#include "officetwin/error.hpp"

namespace officetwin {

World::World(std::shared_ptr<const Catalog> catalog) : catalog_(std::move(catalog)) {
  states_.reserve(catalog_->size());
  for (const auto& d : catalog_->devices()) states_.push_back(instantiate(d));
}

const Value& World::get(const std::string& device_ref, const std::string& property) const {
  auto i = index_of(device_ref);
  if (!i) throw Error(ErrorCode::not_found, "unknown device '" + device_ref + "'");
  return get(*i, property);
}

std::optional<StateChange> World::apply(std::size_t device, const std::string& property,
                                        const Value& value, const Cause& cause, SimTime t) {
  return apply_change(states_.at(device), (*catalog_)[device], property, value, cause, t);
}

std::optional<StateChange> World::apply(const std::string& device_ref, const std::string& property,
                                        const Value& value, const Cause& cause, SimTime t) {
  auto i = index_of(device_ref);
  if (!i) throw Error(ErrorCode::not_found, "unknown device '" + device_ref + "'");
  return apply(*i, property, value, cause, t);
}

bool World::same_values(const World& other) const {
  if (states_.size() != other.states_.size()) return false;
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (states_[i].values != other.states_[i].values) return false;
  }
  return true;
}

}  // namespace officetwin
