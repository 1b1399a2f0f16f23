#pragma once

#include <string>
#include <string_view>

#include "officetwin/rules.hpp"

namespace officetwin {

// Line-oriented rule files, one rule per line, '#' starts a comment:
//
//   rule "<name>" [disabled] when <Device>.<Prop> <op> [<value>]
//       then set <Device>.<Prop> = <value> {, set <Device>.<Prop> = <value>}
//
// <op> is one of: is true, is false, =, !=, >=, <

/// Throws SyntaxError with a 1-based line and column.
RuleSet parse_ruleset(std::string_view text);
Rule parse_rule(std::string_view line, std::size_t line_number = 1);

std::string serialize_ruleset(const RuleSet& rules);
std::string serialize_rule(const Rule& rule);

std::string format_condition(const Condition& cond);
std::string format_actions(const Rule& rule);
std::string format_value(const Value& v);

RuleSet load_ruleset(const std::string& path);

}  // namespace officetwin
