#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "officetwin/metrics.hpp"
#include "officetwin/simulation.hpp"

namespace officetwin {

struct LiveStatus {
  SimTime sim_time = 0.0;
  std::uint64_t ticks = 0;
  bool running = false;
  bool finished = false;
  std::optional<std::string> halted;  // set when a tick failed (e.g. oscillation)
};

struct EventPage {
  std::vector<nlohmann::ordered_json> events;  // each carries its "cursor"
  std::uint64_t next = 0;
};

struct LiveReport {
  SimTime sim_time = 0.0;
  ResourceLedger automated;
  ResourceLedger baseline;
  SdgReport report;
};

/// Wall-clock driven wrapper around a Simulation. The simulation itself stays
/// single-writer: every mutation happens under one mutex, in tick order.
class LiveSimulation {
 public:
  LiveSimulation(Scenario scenario, std::shared_ptr<const Catalog> catalog, RuleSet rules,
                 std::chrono::milliseconds tick_period = std::chrono::milliseconds(1000));
  ~LiveSimulation();
  LiveSimulation(const LiveSimulation&) = delete;
  LiveSimulation& operator=(const LiveSimulation&) = delete;

  void start();
  void stop();
  /// Runs one tick on the caller's thread (tests, or a stopped loop).
  void step();

  /// Resolves once the tick that applies the command has committed.
  /// Throws Error(conflict) if the simulation has finished or halted.
  std::future<CommandOutcome> submit(SetPropertyCommand command);
  /// An `at` in the past means "next tick". Returns the stimulus as scheduled.
  Stimulus inject(Stimulus stimulus);

  RuleSet rules() const;
  /// Throws Error(reference/type_mismatch) if the rules do not fit the catalog.
  void set_rules(RuleSet rules);

  World world() const;
  EnvironmentState environment() const;
  LiveStatus status() const;
  const Catalog& catalog() const noexcept { return *catalog_; }
  std::shared_ptr<const Catalog> catalog_ptr() const noexcept { return catalog_; }

  /// Trace records with cursor > after, at most `limit` of them.
  EventPage events(std::uint64_t after, std::size_t limit = 1000) const;
  /// The trace so far, closed at the current time.
  SimTrace trace() const;

  /// Ledger of the run so far against the always-on baseline replayed over
  /// the same stimuli, commands and rule edits.
  LiveReport report(const PowerProfile& profile) const;

 private:
  void tick_locked();
  void loop(std::stop_token stop);

  std::shared_ptr<const Catalog> catalog_;
  std::chrono::milliseconds period_;
  Scenario scenario_;
  RuleSet initial_rules_;

  mutable std::mutex mutex_;
  std::condition_variable_any wake_;
  Simulation sim_;
  std::map<std::uint64_t, std::promise<CommandOutcome>> pending_;
  std::optional<std::string> halted_;
  std::vector<Stimulus> injected_;
  std::vector<std::pair<std::uint64_t, SetPropertyCommand>> command_log_;  // tick applied at
  std::vector<std::pair<std::uint64_t, RuleSet>> rule_log_;
  std::map<std::string, std::string> handles_;
  std::jthread thread_;
};

}  // namespace officetwin
