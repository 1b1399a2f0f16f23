#include "officetwin/simulation.hpp"

#include <algorithm>

namespace officetwin {

Simulation::Simulation(Scenario scenario, std::shared_ptr<const Catalog> catalog, RuleSet rules)
    : scenario_(std::move(scenario)),
      world_(std::move(catalog)),
      env_(scenario_.constants, scenario_.seed),
      rules_(std::move(rules)) {
  scenario_.check();
  trace_.header = {scenario_.name, scenario_.seed, scenario_.duration, scenario_.timestep};
  for (std::size_t i = 0; i < world_.catalog().size(); ++i) {
    const auto& d = world_.catalog()[i];
    trace_.devices.push_back({d.device_id, d.handle, d.kind, world_.state(i).values});
  }
  for (const auto& a : scenario_.initial) {
    if (auto c = world_.apply(a.device, a.property, a.value, Cause::initialization(), 0.0)) {
      trace_.records.emplace_back(std::move(*c));
    }
  }
}

std::uint64_t Simulation::submit(SetPropertyCommand command) {
  std::uint64_t id = next_command_id_++;
  commands_.emplace_back(id, std::move(command));
  return id;
}

void Simulation::inject(Stimulus stimulus) {
  stimulus.check();
  injected_.push_back(stimulus);
}

void Simulation::record(StateChange c, TickResult& out) {
  trace_.records.emplace_back(c);
  out.changes.push_back(std::move(c));
}

TickResult Simulation::tick() {
  const SimTime t = now();
  TickResult out;
  out.sim_time = t;
  env_.state().sim_time = t;

  if (scenario_.snapshot_every > 0 && t >= next_snapshot_) {
    trace_.records.emplace_back(EnvSnapshot{t, env_.state()});
    while (next_snapshot_ <= t) next_snapshot_ += scenario_.snapshot_every;
  }

  // (1) stimuli, queued commands, standing policy
  const auto& stimuli = scenario_.stimuli;
  while (next_stimulus_ < stimuli.size() && stimuli[next_stimulus_].at <= t) {
    env_.apply(stimuli[next_stimulus_++]);
  }
  auto due = std::stable_partition(injected_.begin(), injected_.end(),
                                   [&](const Stimulus& s) { return s.at > t; });
  for (auto it = due; it != injected_.end(); ++it) env_.apply(*it);
  injected_.erase(due, injected_.end());

  while (!commands_.empty()) {
    auto [id, cmd] = std::move(commands_.front());
    commands_.pop_front();
    CommandOutcome outcome{id, {}, {}};
    try {
      auto c = world_.apply(cmd.device, cmd.property, cmd.value, Cause::command(cmd.issuer), t);
      if (c) {
        outcome.change = *c;
        record(std::move(*c), out);
      }
      if (scenario_.command_hold > 0) {
        overrides_[{*world_.index_of(cmd.device), cmd.property}] = t + scenario_.command_hold;
      }
    } catch (const Error& e) {
      outcome.error = e;
    }
    out.commands.push_back(std::move(outcome));
  }

  EvaluationOptions options;
  options.sim_time = t;
  const bool holding = scenario_.policy && scenario_.policy->window.contains(t);
  if (policy_active_ && !holding) {
    // window closed: held loads go back to their rest value, rules take over from there
    for (const auto& h : scenario_.policy->hold) {
      auto i = world_.index_of(h.device);
      if (!i) continue;
      const auto& d = world_.catalog()[*i];
      auto rest = d.defaults.find(h.property);
      if (rest == d.defaults.end()) continue;
      if (auto c = world_.apply(*i, h.property, rest->second, Cause::command("policy"), t)) {
        record(std::move(*c), out);
      }
    }
  }
  policy_active_ = holding;
  std::erase_if(overrides_, [&](const auto& o) { return o.second <= t; });
  for (const auto& [key, until] : overrides_) options.locked.insert(key);
  if (holding) {
    for (const auto& h : scenario_.policy->hold) {
      auto i = world_.index_of(h.device);
      if (!i) throw Error(ErrorCode::not_found, "policy names unknown device '" + h.device + "'");
      if (auto c = world_.apply(*i, h.property, h.value, Cause::command("policy"), t)) {
        record(std::move(*c), out);
      }
      options.locked.emplace(*i, h.property);
    }
  }

  // (2) sense
  for (auto& c : env_.sense(world_)) record(std::move(c), out);

  // (3) rules
  try {
    out.evaluation = run_to_fixed_point(rules_, world_, options);
  } catch (const OscillationError& e) {
    throw OscillationError(e.rules(), e.passes(), t);
  }
  firings_ += out.evaluation.firings.size();
  for (const auto& c : out.evaluation.changes()) record(c, out);

  // (4) actuator feedback, (5) advance
  env_.couple_actuators(world_, scenario_.timestep);
  ++ticks_;
  env_.state().sim_time = now();
  return out;
}

void Simulation::finish() {
  trace_.end = EnvSnapshot{now(), env_.state()};
}

const SimTrace& Simulation::run() {
  while (!finished()) tick();
  finish();
  return trace_;
}

SimTrace run_scenario(const Scenario& scenario, std::shared_ptr<const Catalog> catalog,
                      const RuleSet& rules) {
  Simulation sim(scenario, std::move(catalog), rules);
  return sim.run();
}

}  // namespace officetwin
