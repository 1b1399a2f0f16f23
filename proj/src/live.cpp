#include "officetwin/live.hpp"

#include <algorithm>

#include "officetwin/rule_check.hpp"

namespace officetwin {

namespace {

void check_rules(const RuleSet& rules, const Catalog& catalog) {
  for (const auto& d : validate(rules, catalog)) {
    if (d.severity != Severity::error) continue;
    ErrorCode code = ErrorCode::domain;
    if (d.code == "dangling-reference") code = ErrorCode::reference;
    if (d.code == "type-mismatch") code = ErrorCode::type_mismatch;
    if (d.code == "sensor-write") code = ErrorCode::permission;
    if (d.code == "oscillation") code = ErrorCode::oscillation;
    throw Error(code, d.message, d.code);
  }
}

}  // namespace

LiveSimulation::LiveSimulation(Scenario scenario, std::shared_ptr<const Catalog> catalog, RuleSet rules,
                               std::chrono::milliseconds tick_period)
    : catalog_(catalog),
      period_(tick_period),
      scenario_(scenario),
      initial_rules_(rules),
      sim_(std::move(scenario), catalog, std::move(rules)) {
  if (period_.count() <= 0) throw Error(ErrorCode::configuration, "tick period must be positive");
  for (const auto& d : catalog_->devices()) handles_[d.device_id] = d.handle;
}

LiveSimulation::~LiveSimulation() { stop(); }

void LiveSimulation::start() {
  std::lock_guard lock(mutex_);
  if (thread_.joinable()) return;
  thread_ = std::jthread([this](std::stop_token st) { loop(st); });
}

void LiveSimulation::stop() {
  std::jthread t;
  {
    std::lock_guard lock(mutex_);
    t = std::move(thread_);
  }
  if (t.joinable()) {
    t.request_stop();
    wake_.notify_all();
    t.join();
  }
}

void LiveSimulation::loop(std::stop_token stop) {
  auto next = std::chrono::steady_clock::now();
  std::unique_lock lock(mutex_);
  while (!stop.stop_requested()) {
    tick_locked();
    next += period_;
    wake_.wait_until(lock, stop, next, [] { return false; });
  }
}

void LiveSimulation::step() {
  std::lock_guard lock(mutex_);
  tick_locked();
}

void LiveSimulation::tick_locked() {
  if (halted_ || sim_.finished()) return;
  try {
    auto result = sim_.tick();
    for (auto& outcome : result.commands) {
      auto it = pending_.find(outcome.id);
      if (it == pending_.end()) continue;
      it->second.set_value(std::move(outcome));
      pending_.erase(it);
    }
  } catch (const Error& e) {
    halted_ = e.what();
    for (auto& [id, promise] : pending_) {
      promise.set_value(CommandOutcome{id, std::nullopt, e});
    }
    pending_.clear();
  }
}

std::future<CommandOutcome> LiveSimulation::submit(SetPropertyCommand command) {
  std::lock_guard lock(mutex_);
  if (halted_) throw Error(ErrorCode::conflict, "simulation halted: " + *halted_);
  if (sim_.finished()) throw Error(ErrorCode::conflict, "simulation has finished");
  command_log_.emplace_back(sim_.ticks(), command);
  auto id = sim_.submit(std::move(command));
  auto& promise = pending_[id];
  return promise.get_future();
}

Stimulus LiveSimulation::inject(Stimulus stimulus) {
  stimulus.check();
  std::lock_guard lock(mutex_);
  if (sim_.finished()) throw Error(ErrorCode::conflict, "simulation has finished");
  stimulus.at = std::max(stimulus.at, sim_.now());
  injected_.push_back(stimulus);
  sim_.inject(stimulus);
  return stimulus;
}

RuleSet LiveSimulation::rules() const {
  std::lock_guard lock(mutex_);
  return sim_.rules();
}

void LiveSimulation::set_rules(RuleSet rules) {
  check_rules(rules, *catalog_);
  std::lock_guard lock(mutex_);
  rule_log_.emplace_back(sim_.ticks(), rules);
  sim_.set_rules(std::move(rules));
}

World LiveSimulation::world() const {
  std::lock_guard lock(mutex_);
  return sim_.world();
}

EnvironmentState LiveSimulation::environment() const {
  std::lock_guard lock(mutex_);
  return sim_.environment().state();
}

LiveStatus LiveSimulation::status() const {
  std::lock_guard lock(mutex_);
  return {sim_.now(), sim_.ticks(), thread_.joinable(), sim_.finished(), halted_};
}

EventPage LiveSimulation::events(std::uint64_t after, std::size_t limit) const {
  std::lock_guard lock(mutex_);
  const auto& records = sim_.trace().records;
  EventPage page;
  page.next = std::min<std::uint64_t>(after, records.size());
  for (auto i = page.next; i < records.size() && page.events.size() < limit; ++i) {
    auto j = record_to_json(records[i], handles_);
    j["cursor"] = i + 1;
    page.events.push_back(std::move(j));
    page.next = i + 1;
  }
  return page;
}

SimTrace LiveSimulation::trace() const {
  std::lock_guard lock(mutex_);
  SimTrace t = sim_.trace();
  t.end = EnvSnapshot{sim_.now(), sim_.environment().state()};
  return t;
}

LiveReport LiveSimulation::report(const PowerProfile& profile) const {
  SimTrace automated;
  std::uint64_t ticks = 0;
  std::vector<Stimulus> injected;
  std::vector<std::pair<std::uint64_t, SetPropertyCommand>> commands;
  std::vector<std::pair<std::uint64_t, RuleSet>> rule_edits;
  {
    std::lock_guard lock(mutex_);
    automated = sim_.trace();
    automated.end = EnvSnapshot{sim_.now(), sim_.environment().state()};
    ticks = sim_.ticks();
    injected = injected_;
    commands = command_log_;
    rule_edits = rule_log_;
  }

  LiveReport out;
  out.sim_time = automated.end->sim_time;
  out.automated = accumulate(automated, profile);
  if (ticks == 0) {
    out.baseline = out.automated;
  } else {
    Scenario scenario = baseline_transform(scenario_);
    scenario.duration = out.sim_time;
    scenario.stimuli.insert(scenario.stimuli.end(), injected.begin(), injected.end());
    std::stable_sort(scenario.stimuli.begin(), scenario.stimuli.end(),
                     [](const Stimulus& a, const Stimulus& b) { return a.at < b.at; });
    Simulation replay(scenario, catalog_, initial_rules_);
    std::size_t c = 0, r = 0;
    for (std::uint64_t k = 0; k < ticks; ++k) {
      for (; r < rule_edits.size() && rule_edits[r].first == k; ++r) replay.set_rules(rule_edits[r].second);
      for (; c < commands.size() && commands[c].first == k; ++c) replay.submit(commands[c].second);
      replay.tick();
    }
    replay.finish();
    out.baseline = accumulate(replay.trace(), profile);
  }
  out.report = sdg_report(out.automated, out.baseline);
  return out;
}

}  // namespace officetwin
