#include "officetwin/rules.hpp"

#include <algorithm>
#include <map>

#include "officetwin/error.hpp"

namespace officetwin {

std::string_view comparator_text(Comparator c) {
  switch (c) {
    case Comparator::is_true: return "is true";
    case Comparator::is_false: return "is false";
    case Comparator::eq: return "=";
    case Comparator::neq: return "!=";
    case Comparator::gte: return ">=";
    case Comparator::lt: return "<";
  }
  return "?";
}

Comparator negate(Comparator c) {
  switch (c) {
    case Comparator::is_true: return Comparator::is_false;
    case Comparator::is_false: return Comparator::is_true;
    case Comparator::eq: return Comparator::neq;
    case Comparator::neq: return Comparator::eq;
    case Comparator::gte: return Comparator::lt;
    case Comparator::lt: return Comparator::gte;
  }
  return c;
}

bool needs_operand(Comparator c) { return c != Comparator::is_true && c != Comparator::is_false; }

RuleSet::RuleSet(std::vector<Rule> rules) {
  for (auto& r : rules) add(std::move(r));
}

const Rule* RuleSet::find(const std::string& name) const {
  for (const auto& r : rules_) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

void RuleSet::add(Rule rule) {
  if (find(rule.name) != nullptr) {
    throw Error(ErrorCode::conflict, "rule \"" + rule.name + "\" already exists");
  }
  rules_.push_back(std::move(rule));
}

void RuleSet::replace(const std::string& name, Rule rule) {
  auto it = std::find_if(rules_.begin(), rules_.end(), [&](const Rule& r) { return r.name == name; });
  if (it == rules_.end()) throw Error(ErrorCode::not_found, "no rule \"" + name + "\"");
  if (rule.name != name && find(rule.name) != nullptr) {
    throw Error(ErrorCode::conflict, "rule \"" + rule.name + "\" already exists");
  }
  *it = std::move(rule);
}

void RuleSet::remove(const std::string& name) {
  auto it = std::find_if(rules_.begin(), rules_.end(), [&](const Rule& r) { return r.name == name; });
  if (it == rules_.end()) throw Error(ErrorCode::not_found, "no rule \"" + name + "\"");
  rules_.erase(it);
}

std::vector<StateChange> EvaluationTrace::changes() const {
  std::vector<StateChange> out;
  for (const auto& f : firings) out.insert(out.end(), f.changes.begin(), f.changes.end());
  return out;
}

namespace {

std::size_t resolve(const World& world, const PropertyRef& ref) {
  auto i = world.index_of(ref.device);
  if (!i) throw Error(ErrorCode::reference, "unknown device '" + ref.device + "'", ref.to_string());
  if (world.catalog()[*i].find_property(ref.property) == nullptr) {
    throw Error(ErrorCode::reference, "unknown property '" + ref.to_string() + "'", ref.to_string());
  }
  return *i;
}

[[noreturn]] void mismatch(const Condition& cond, const char* what) {
  throw Error(ErrorCode::type_mismatch,
              cond.subject.to_string() + " " + std::string(comparator_text(cond.op)) + ": " + what,
              cond.subject.to_string());
}

}  // namespace

bool evaluate_condition(const Condition& cond, const World& world) {
  auto device = resolve(world, cond.subject);
  const Value& v = world.get(device, cond.subject.property);
  switch (cond.op) {
    case Comparator::is_true:
    case Comparator::is_false:
      if (!v.is_boolean()) mismatch(cond, "property is not boolean");
      return v.as_boolean() == (cond.op == Comparator::is_true);
    case Comparator::eq:
    case Comparator::neq: {
      if (!cond.operand || cond.operand->kind() != v.kind()) {
        mismatch(cond, "operand type differs from property type");
      }
      bool equal = *cond.operand == v;
      return cond.op == Comparator::eq ? equal : !equal;
    }
    case Comparator::gte:
    case Comparator::lt: {
      if (!v.is_number() || !cond.operand || !cond.operand->is_number()) {
        mismatch(cond, "ordering needs a numeric property and operand");
      }
      bool ge = v.as_number() >= cond.operand->as_number();
      return cond.op == Comparator::gte ? ge : !ge;
    }
  }
  return false;
}

PassResult single_pass(const RuleSet& rules, World& world, const EvaluationOptions& options,
                       int pass_number) {
  struct Write {
    std::size_t rule;
    std::size_t action;
    std::size_t device;
    const RuleAction* act;
  };
  using Key = std::pair<std::size_t, std::string>;

  std::map<Key, Write> winners;
  std::vector<std::vector<RuleAction>> overridden(rules.size());
  const auto& list = rules.rules();

  for (std::size_t r = 0; r < list.size(); ++r) {
    const Rule& rule = list[r];
    if (!rule.enabled) continue;
    if (!evaluate_condition(rule.condition, world)) continue;
    for (std::size_t a = 0; a < rule.actions.size(); ++a) {
      const RuleAction& act = rule.actions[a];
      std::size_t device = resolve(world, act.target);
      check_write(world.catalog()[device], act.target.property, act.value, Cause::rule(rule.name));
      Key key{device, act.target.property};
      if (options.locked.contains(key)) continue;
      auto [it, inserted] = winners.try_emplace(key, Write{r, a, device, &act});
      if (!inserted) {
        const RuleAction& lost = *it->second.act;
        if (world.get(device, lost.target.property) != lost.value) overridden[it->second.rule].push_back(lost);
        it->second = Write{r, a, device, &act};
      }
    }
  }

  std::vector<Write> order;
  order.reserve(winners.size());
  for (const auto& [key, w] : winners) order.push_back(w);
  std::sort(order.begin(), order.end(), [](const Write& x, const Write& y) {
    return std::tie(x.rule, x.action) < std::tie(y.rule, y.action);
  });

  std::vector<std::vector<StateChange>> changed(list.size());
  for (const Write& w : order) {
    auto change = world.apply(w.device, w.act->target.property, w.act->value,
                              Cause::rule(list[w.rule].name), options.sim_time);
    if (change) changed[w.rule].push_back(std::move(*change));
  }

  // a rule is reported if it changed something or lost a would-be change to a later rule
  PassResult result;
  for (std::size_t r = 0; r < list.size(); ++r) {
    if (changed[r].empty() && overridden[r].empty()) continue;
    result.fired.push_back(list[r].name);
    for (const auto& c : changed[r]) result.changes.push_back(c);
    result.firings.push_back(Firing{pass_number, list[r].name, std::move(changed[r]), std::move(overridden[r])});
  }
  return result;
}

EvaluationTrace run_to_fixed_point(const RuleSet& rules, World& world,
                                   const EvaluationOptions& options) {
  if (options.max_passes < 1) {
    throw Error(ErrorCode::bad_request, "max_passes must be at least 1");
  }
  EvaluationTrace trace;
  std::vector<std::string> previous;
  for (int pass = 1; pass <= options.max_passes; ++pass) {
    PassResult r = single_pass(rules, world, options, pass);
    trace.passes = pass;
    if (r.changes.empty()) {
      trace.converged = true;
      return trace;
    }
    if (pass == options.max_passes) {
      // a cycle of period two is the common case, so name the rules of both final passes
      std::vector<std::string> involved;
      for (const auto& rule : rules.rules()) {
        auto in = [&](const std::vector<std::string>& v) {
          return std::find(v.begin(), v.end(), rule.name) != v.end();
        };
        if (in(previous) || in(r.fired)) involved.push_back(rule.name);
      }
      throw OscillationError(involved, pass);
    }
    previous = r.fired;
    for (auto& f : r.firings) trace.firings.push_back(std::move(f));
  }
  return trace;
}

}  // namespace officetwin
