#include "officetwin/rule_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "officetwin/rule_text.hpp"

namespace officetwin {

std::string_view severity_name(Severity s) {
  switch (s) {
    case Severity::error: return "error";
    case Severity::warning: return "warning";
    case Severity::note: return "note";
  }
  return "note";
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::error; });
}

namespace {

struct Resolved {
  const DeviceDescriptor* device = nullptr;
  const PropertySchema* schema = nullptr;
};

Resolved resolve(const Catalog& catalog, const PropertyRef& ref) {
  auto i = catalog.index_of(ref.device);
  if (!i) return {};
  const auto& d = catalog[*i];
  return {&d, d.find_property(ref.property)};
}

// Canonical key so that a handle and a serial naming the same property compare equal.
std::string canonical(const Catalog& catalog, const PropertyRef& ref) {
  auto i = catalog.index_of(ref.device);
  return (i ? catalog[*i].device_id : ref.device) + "." + ref.property;
}

bool holds(const Condition& c, const Value& v) {
  switch (c.op) {
    case Comparator::is_true: return v.is_boolean() && v.as_boolean();
    case Comparator::is_false: return v.is_boolean() && !v.as_boolean();
    case Comparator::eq: return c.operand && *c.operand == v;
    case Comparator::neq: return c.operand && !(*c.operand == v);
    case Comparator::gte:
      return v.is_number() && c.operand && c.operand->is_number() &&
             v.as_number() >= c.operand->as_number();
    case Comparator::lt:
      return v.is_number() && c.operand && c.operand->is_number() &&
             v.as_number() < c.operand->as_number();
  }
  return false;
}

// Finite set of domain values that distinguishes every condition boundary in `hints`.
std::vector<Value> candidates(const PropertySchema& s, const std::vector<Value>& hints) {
  std::vector<Value> out;
  auto push = [&](const Value& v) {
    if (s.accepts(v) && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  switch (s.kind) {
    case PropertyKind::boolean:
      push(Value::boolean(false));
      push(Value::boolean(true));
      break;
    case PropertyKind::enumeration:
      for (const auto& l : s.labels) push(Value::text(l));
      break;
    case PropertyKind::number: {
      push(Value::number(s.min));
      push(Value::number(s.max));
      for (const auto& h : hints) {
        if (!h.is_number()) continue;
        double o = h.as_number();
        const double inf = std::numeric_limits<double>::infinity();
        for (double x : {o, std::floor(o), std::ceil(o), o - 1, o + 1, std::nextafter(o, -inf),
                         std::nextafter(o, inf)}) {
          push(Value::number(x));
        }
      }
      if (!s.integral) push(Value::number((s.min + s.max) / 2));
      break;
    }
  }
  return out;
}

std::vector<Value> operands_of(const std::vector<const Condition*>& conds) {
  std::vector<Value> out;
  for (const auto* c : conds) {
    if (c->operand) out.push_back(*c->operand);
  }
  return out;
}

bool satisfiable(const PropertySchema& s, const std::vector<const Condition*>& conds) {
  for (const auto& v : candidates(s, operands_of(conds))) {
    if (std::all_of(conds.begin(), conds.end(), [&](const Condition* c) { return holds(*c, v); })) {
      return true;
    }
  }
  return false;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

// Simulates rules a and b alone from every start state over the properties they touch.
// Returns {starts where either rule holds, of which how many never settle}.
std::pair<int, int> pair_dynamics(const Catalog& catalog, const Rule& a, const Rule& b) {
  std::vector<std::string> keys;
  std::map<std::string, const PropertySchema*> schema;
  std::map<std::string, std::vector<const Condition*>> conds;
  auto note = [&](const PropertyRef& ref) {
    auto k = canonical(catalog, ref);
    if (!schema.contains(k)) {
      keys.push_back(k);
      schema[k] = resolve(catalog, ref).schema;
    }
    return k;
  };
  std::string ka = note(a.condition.subject);
  std::string kb = note(b.condition.subject);
  conds[ka].push_back(&a.condition);
  conds[kb].push_back(&b.condition);
  for (const auto* r : {&a, &b}) {
    for (const auto& act : r->actions) note(act.target);
  }

  std::vector<std::vector<Value>> domain;
  for (const auto& k : keys) {
    auto hints = operands_of(conds[k]);
    for (const auto* r : {&a, &b}) {
      for (const auto& act : r->actions) {
        if (canonical(catalog, act.target) == k) hints.push_back(act.value);
      }
    }
    domain.push_back(candidates(*schema[k], hints));
    if (domain.back().empty()) return {0, 0};
  }

  std::size_t total = 1;
  for (const auto& d : domain) total *= d.size();
  if (total > 4096) return {0, 0};

  int active = 0;
  int cycling = 0;
  for (std::size_t n = 0; n < total; ++n) {
    std::map<std::string, Value> world;
    std::size_t rest = n;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      world[keys[i]] = domain[i][rest % domain[i].size()];
      rest /= domain[i].size();
    }
    auto holds_in = [&](const Rule& r, const std::map<std::string, Value>& w) {
      return holds(r.condition, w.at(canonical(catalog, r.condition.subject)));
    };
    if (!holds_in(a, world) && !holds_in(b, world)) continue;
    ++active;
    bool settled = false;
    std::vector<std::map<std::string, Value>> history;
    for (int step = 0; step < 64; ++step) {
      auto next = world;
      for (const auto* r : {&a, &b}) {
        if (!holds_in(*r, world)) continue;
        for (const auto& act : r->actions) next[canonical(catalog, act.target)] = act.value;
      }
      if (next == world) {
        settled = true;
        break;
      }
      if (std::find(history.begin(), history.end(), next) != history.end()) break;
      history.push_back(world);
      world = std::move(next);
    }
    if (!settled) ++cycling;
  }
  return {active, cycling};
}

}  // namespace

std::vector<Diagnostic> validate(const RuleSet& rules, const Catalog& catalog) {
  std::vector<Diagnostic> out;
  std::vector<bool> sound(rules.size(), true);
  const auto& list = rules.rules();

  for (std::size_t i = 0; i < list.size(); ++i) {
    const Rule& r = list[i];
    auto error = [&](std::string code, std::string message) {
      out.push_back({Severity::error, std::move(code), {r.name}, std::move(message)});
      sound[i] = false;
    };
    auto subject = resolve(catalog, r.condition.subject);
    if (subject.device == nullptr || subject.schema == nullptr) {
      error("dangling-reference", quoted(r.name) + " tests unknown " + r.condition.subject.to_string());
    } else {
      const auto& s = *subject.schema;
      const auto& c = r.condition;
      bool ok = true;
      switch (c.op) {
        case Comparator::is_true:
        case Comparator::is_false: ok = s.kind == PropertyKind::boolean; break;
        case Comparator::gte:
        case Comparator::lt:
          ok = s.kind == PropertyKind::number && c.operand && c.operand->is_number();
          break;
        case Comparator::eq:
        case Comparator::neq: {
          if (!c.operand) {
            ok = false;
          } else if (s.kind == PropertyKind::boolean) {
            ok = c.operand->is_boolean();
          } else if (s.kind == PropertyKind::enumeration) {
            ok = c.operand->is_text();
          } else {
            ok = c.operand->is_number();
          }
          break;
        }
      }
      if (!ok) {
        error("type-mismatch", quoted(r.name) + ": '" + format_condition(c) +
                                   "' does not fit the type of " + c.subject.to_string());
      } else if (!satisfiable(s, {&c})) {
        out.push_back({Severity::warning, "never-holds", {r.name},
                       quoted(r.name) + ": '" + format_condition(c) + "' can never hold"});
      }
    }
    if (r.actions.empty()) error("no-actions", quoted(r.name) + " has no actions");
    for (const auto& act : r.actions) {
      auto target = resolve(catalog, act.target);
      if (target.device == nullptr || target.schema == nullptr) {
        error("dangling-reference", quoted(r.name) + " sets unknown " + act.target.to_string());
      } else if (!target.schema->accepts(act.value)) {
        error("type-mismatch", quoted(r.name) + ": " + format_value(act.value) +
                                   " is outside the domain of " + act.target.to_string());
      } else if (target.schema->writable_by == WritableBy::sensor) {
        error("sensor-write", quoted(r.name) + " writes sensor reading " + act.target.to_string());
      }
    }
  }

  // Conflicting writes under jointly satisfiable conditions.
  for (std::size_t i = 0; i < list.size(); ++i) {
    for (std::size_t j = i + 1; j < list.size(); ++j) {
      const Rule& a = list[i];
      const Rule& b = list[j];
      if (!sound[i] || !sound[j] || !a.enabled || !b.enabled) continue;
      bool joint = true;
      if (canonical(catalog, a.condition.subject) == canonical(catalog, b.condition.subject)) {
        joint = satisfiable(*resolve(catalog, a.condition.subject).schema, {&a.condition, &b.condition});
      }
      if (!joint) continue;
      for (const auto& wa : a.actions) {
        for (const auto& wb : b.actions) {
          if (canonical(catalog, wa.target) != canonical(catalog, wb.target)) continue;
          if (wa.value == wb.value) continue;
          out.push_back({Severity::note, "conflict", {a.name, b.name},
                         quoted(a.name) + " sets " + wa.target.to_string() + " = " +
                             format_value(wa.value) + " but " + quoted(b.name) + " sets it to " +
                             format_value(wb.value) + " when both hold; " + quoted(b.name) +
                             " wins by priority"});
        }
      }
    }
  }

  // Mutually dependent pairs that cannot settle.
  for (std::size_t i = 0; i < list.size(); ++i) {
    for (std::size_t j = i + 1; j < list.size(); ++j) {
      const Rule& a = list[i];
      const Rule& b = list[j];
      if (!sound[i] || !sound[j] || !a.enabled || !b.enabled) continue;
      auto writes = [&](const Rule& w, const Rule& r) {
        auto subject = canonical(catalog, r.condition.subject);
        return std::any_of(w.actions.begin(), w.actions.end(), [&](const RuleAction& act) {
          return canonical(catalog, act.target) == subject;
        });
      };
      if (!writes(a, b) || !writes(b, a)) continue;
      auto [active, cycling] = pair_dynamics(catalog, a, b);
      if (cycling == 0) continue;
      if (cycling == active) {
        out.push_back({Severity::error, "oscillation", {a.name, b.name},
                       quoted(a.name) + " and " + quoted(b.name) +
                           " undo each other's writes and oscillate whenever either fires"});
      } else {
        out.push_back({Severity::warning, "oscillation", {a.name, b.name},
                       quoted(a.name) + " and " + quoted(b.name) +
                           " can oscillate from some states"});
      }
    }
  }
  return out;
}

}  // namespace officetwin
