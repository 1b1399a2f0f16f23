#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "officetwin/catalog.hpp"
#include "officetwin/environment.hpp"
#include "officetwin/error.hpp"
#include "officetwin/rules.hpp"
#include "officetwin/scenario.hpp"
#include "officetwin/trace.hpp"
#include "officetwin/world.hpp"

namespace officetwin {

struct SetPropertyCommand {
  std::string device;
  std::string property;
  Value value;
  std::string issuer;  // username or "policy"
};

struct CommandOutcome {
  std::uint64_t id = 0;
  std::optional<StateChange> change;
  std::optional<Error> error;
};

struct TickResult {
  SimTime sim_time = 0.0;
  std::vector<StateChange> changes;
  std::vector<CommandOutcome> commands;
  EvaluationTrace evaluation;
};

/// Fixed-timestep office simulation. Single writer: all mutation happens in tick().
///
/// Each tick runs, in order: due stimuli and queued commands, sensing, rule
/// evaluation to a fixed point, actuator feedback, then advances the clock.
/// A property written by a command is shielded from rule writes for
/// scenario().command_hold seconds.
class Simulation {
 public:
  Simulation(Scenario scenario, std::shared_ptr<const Catalog> catalog, RuleSet rules);

  const Scenario& scenario() const noexcept { return scenario_; }
  const World& world() const noexcept { return world_; }
  const Environment& environment() const noexcept { return env_; }
  const RuleSet& rules() const noexcept { return rules_; }
  const SimTrace& trace() const noexcept { return trace_; }
  SimTime now() const noexcept { return static_cast<double>(ticks_) * scenario_.timestep; }
  std::uint64_t ticks() const noexcept { return ticks_; }
  std::size_t firings() const noexcept { return firings_; }
  bool finished() const noexcept { return now() >= scenario_.duration; }

  void set_rules(RuleSet rules) { rules_ = std::move(rules); }

  /// Queued; applied at step (1) of the next tick.
  std::uint64_t submit(SetPropertyCommand command);
  /// Queued; applied at the next tick no earlier than its `at`.
  void inject(Stimulus stimulus);

  /// Throws OscillationError annotated with the tick's sim_time.
  TickResult tick();
  /// Runs every remaining tick and closes the trace.
  const SimTrace& run();
  /// Appends the terminal snapshot.
  void finish();

 private:
  void record(StateChange c, TickResult& out);

  Scenario scenario_;
  World world_;
  Environment env_;
  RuleSet rules_;
  SimTrace trace_;
  std::uint64_t ticks_ = 0;
  std::size_t next_stimulus_ = 0;
  std::vector<Stimulus> injected_;
  std::deque<std::pair<std::uint64_t, SetPropertyCommand>> commands_;
  std::uint64_t next_command_id_ = 1;
  SimTime next_snapshot_ = 0.0;
  std::size_t firings_ = 0;
  bool policy_active_ = false;
  std::map<std::pair<std::size_t, std::string>, SimTime> overrides_;  // operator command holds
};

/// Loads the rules and catalog a scenario refers to (or the built-in catalog).
SimTrace run_scenario(const Scenario& scenario, std::shared_ptr<const Catalog> catalog,
                      const RuleSet& rules);

}  // namespace officetwin
