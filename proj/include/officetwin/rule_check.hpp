#pragma once

#include <string>
#include <vector>

#include "officetwin/catalog.hpp"
#include "officetwin/rules.hpp"

namespace officetwin {

enum class Severity { error, warning, note };

std::string_view severity_name(Severity s);

struct Diagnostic {
  Severity severity = Severity::note;
  std::string code;  // dangling-reference, type-mismatch, sensor-write, never-holds, conflict, oscillation
  std::vector<std::string> rules;
  std::string message;
};

/// Static checks of a rule set against a catalog. Never throws on rule content.
std::vector<Diagnostic> validate(const RuleSet& rules, const Catalog& catalog);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace officetwin
