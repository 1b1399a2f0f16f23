#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "officetwin/device.hpp"
#include "officetwin/world.hpp"

namespace officetwin {

enum class Comparator { is_true, is_false, eq, neq, gte, lt };

std::string_view comparator_text(Comparator c);
Comparator negate(Comparator c);
bool needs_operand(Comparator c);

struct PropertyRef {
  std::string device;  // handle or device_id
  std::string property;

  std::string to_string() const { return device + "." + property; }
  friend bool operator==(const PropertyRef&, const PropertyRef&) = default;
  friend auto operator<=>(const PropertyRef&, const PropertyRef&) = default;
};

struct Condition {
  PropertyRef subject;
  Comparator op = Comparator::is_true;
  std::optional<Value> operand;

  friend bool operator==(const Condition&, const Condition&) = default;
};

struct RuleAction {
  PropertyRef target;
  Value value;

  friend bool operator==(const RuleAction&, const RuleAction&) = default;
};

struct Rule {
  std::string name;
  bool enabled = true;
  Condition condition;
  std::vector<RuleAction> actions;

  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Ordered rules; list position is priority (later writes win).
class RuleSet {
 public:
  RuleSet() = default;
  explicit RuleSet(std::vector<Rule> rules);

  const std::vector<Rule>& rules() const noexcept { return rules_; }
  std::size_t size() const noexcept { return rules_.size(); }
  bool empty() const noexcept { return rules_.empty(); }

  const Rule* find(const std::string& name) const;
  /// Appends; throws Error(conflict) on a duplicate name.
  void add(Rule rule);
  /// Replaces in place, keeping the list position.
  void replace(const std::string& name, Rule rule);
  void remove(const std::string& name);

  friend bool operator==(const RuleSet&, const RuleSet&) = default;

 private:
  std::vector<Rule> rules_;
};

/// A rule whose condition held and that either changed a value or had a write
/// that would have changed a value superseded by a later rule in the same pass.
struct Firing {
  int pass = 0;
  std::string rule;
  std::vector<StateChange> changes;
  /// Writes by this rule, differing from the current value, that a later rule superseded.
  std::vector<RuleAction> overridden;
};

struct EvaluationTrace {
  int passes = 0;
  std::vector<Firing> firings;
  bool converged = false;

  std::vector<StateChange> changes() const;
};

struct EvaluationOptions {
  int max_passes = 16;
  SimTime sim_time = 0.0;
  /// Properties rules may not write; their actions are dropped.
  std::set<std::pair<std::size_t, std::string>> locked;
};

struct PassResult {
  std::vector<std::string> fired;
  std::vector<Firing> firings;
  std::vector<StateChange> changes;
};

bool evaluate_condition(const Condition& cond, const World& world);

/// One pass: every enabled rule is tested against the world as it stood when
/// the pass began; writes are merged in list order, last write wins, and the
/// merged result is applied at the end of the pass.
PassResult single_pass(const RuleSet& rules, World& world, const EvaluationOptions& options = {},
                       int pass_number = 1);

/// Repeats single_pass until a pass changes nothing. Throws OscillationError
/// when the pass budget is spent while state is still changing.
EvaluationTrace run_to_fixed_point(const RuleSet& rules, World& world,
                                   const EvaluationOptions& options = {});

}  // namespace officetwin
