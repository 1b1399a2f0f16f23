#pragma once

#include <memory>
#include <string>
#include <vector>

#include "officetwin/catalog.hpp"
#include "officetwin/rule_text.hpp"
#include "officetwin/rules.hpp"
#include "officetwin/scenario.hpp"
#include "officetwin/simulation.hpp"
#include "officetwin/world.hpp"

namespace office {

using namespace officetwin;

inline std::string data_path(const std::string& rel) { return std::string(OFFICETWIN_DATA_DIR) + "/" + rel; }

inline std::shared_ptr<const Catalog> catalog() {
  static auto c = std::make_shared<const Catalog>(builtin_catalog());
  return c;
}

inline RuleSet default_rules() { return load_ruleset(data_path("default.rules")); }

/// The twelve rows of the server's conditions table, in order.
inline RuleSet table_rows() {
  auto all = default_rules().rules();
  return RuleSet(std::vector<Rule>(all.begin(), all.begin() + 12));
}

inline World rest_world() { return World(catalog()); }

inline void set(World& w, const std::string& device, const std::string& prop, Value v) {
  w.apply(device, prop, std::move(v), Cause::initialization(), 0.0);
}

inline Scenario scenario(const std::string& name) {
  return Scenario::load(data_path("scenarios/" + name + ".json"));
}

inline RuleSet rules_of(const Scenario& s) {
  return s.rules_path.empty() ? RuleSet{} : load_ruleset(s.rules_path);
}

inline SimTrace run(const Scenario& s) { return run_scenario(s, catalog(), rules_of(s)); }

}  // namespace office
