#include "officetwin/rule_text.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "officetwin/error.hpp"

namespace officetwin {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_number) : s_(line), line_(line_number) {}

  Rule parse() {
    Rule rule;
    keyword("rule");
    rule.name = quoted("rule name");
    skip_ws();
    if (peek_word() == "disabled") {
      keyword("disabled");
      rule.enabled = false;
    }
    keyword("when");
    rule.condition.subject = property_ref();
    rule.condition.op = comparator();
    if (needs_operand(rule.condition.op)) rule.condition.operand = value();
    keyword("then");
    do {
      keyword("set");
      RuleAction act;
      act.target = property_ref();
      skip_ws();
      expect('=', "'=' after action target");
      act.value = value();
      rule.actions.push_back(std::move(act));
      skip_ws();
    } while (accept(','));
    skip_ws();
    if (pos_ < s_.size()) fail("unexpected text after actions");
    return rule;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(line_, pos_ + 1, what); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    if (!accept(c)) fail(std::string("expected ") + what);
  }

  std::string_view peek_word() {
    skip_ws();
    std::size_t end = pos_;
    while (end < s_.size() && ident_char(s_[end])) ++end;
    return s_.substr(pos_, end - pos_);
  }

  void keyword(std::string_view kw) {
    if (peek_word() != kw) fail("expected '" + std::string(kw) + "'");
    pos_ += kw.size();
  }

  std::string identifier(const char* what) {
    skip_ws();
    if (pos_ >= s_.size() || !ident_start(s_[pos_])) fail(std::string("expected ") + what);
    std::size_t start = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string quoted(const char* what) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != '"') fail(std::string("expected quoted ") + what);
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\') {
        ++pos_;
        if (pos_ >= s_.size() || (s_[pos_] != '"' && s_[pos_] != '\\')) fail("bad escape");
      }
      out += s_[pos_++];
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  PropertyRef property_ref() {
    PropertyRef ref;
    ref.device = identifier("device name");
    if (pos_ >= s_.size() || s_[pos_] != '.') fail("expected '.' between device and property");
    ++pos_;
    ref.property = identifier("property name");
    return ref;
  }

  Comparator comparator() {
    skip_ws();
    auto rest = s_.substr(pos_);
    auto take = [&](std::size_t n, Comparator c) {
      pos_ += n;
      return c;
    };
    if (rest.starts_with(">=")) return take(2, Comparator::gte);
    if (rest.starts_with("!=")) return take(2, Comparator::neq);
    if (rest.starts_with("<")) return take(1, Comparator::lt);
    if (rest.starts_with("=")) return take(1, Comparator::eq);
    if (peek_word() == "is") {
      std::size_t at = pos_;
      keyword("is");
      auto w = peek_word();
      if (w == "true") return take(4, Comparator::is_true);
      if (w == "false") return take(5, Comparator::is_false);
      pos_ = at;
      fail("expected 'is true' or 'is false'");
    }
    fail("expected comparator (is true, is false, =, !=, >=, <)");
  }

  Value value() {
    skip_ws();
    if (pos_ >= s_.size()) fail("expected value");
    char c = s_[pos_];
    if (c == '"') return Value::text(quoted("value"));
    if (c == '-' || c == '+' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      if (c == '+') ++start;
      double x = 0;
      auto [end, ec] = std::from_chars(s_.data() + start, s_.data() + s_.size(), x);
      if (ec != std::errc{}) fail("malformed number");
      pos_ = static_cast<std::size_t>(end - s_.data());
      return Value::number(x);
    }
    auto word = identifier("value");
    if (word == "true") return Value::boolean(true);
    if (word == "false") return Value::boolean(false);
    return Value::text(word);
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

std::string strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (in_string && c == '\\') {
      ++i;
    } else if (c == '"') {
      in_string = !in_string;
    } else if (c == '#' && !in_string) {
      return std::string(line.substr(0, i));
    }
  }
  return std::string(line);
}

bool blank(std::string_view s) {
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

bool bare_label(const std::string& s) {
  if (s.empty() || !ident_start(s[0]) || s == "true" || s == "false") return false;
  for (char c : s) {
    if (!ident_char(c)) return false;
  }
  return true;
}

}  // namespace

Rule parse_rule(std::string_view line, std::size_t line_number) {
  return LineParser(strip_comment(line), line_number).parse();
}

RuleSet parse_ruleset(std::string_view text) {
  RuleSet rules;
  std::size_t line_number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_number;
    std::string code = strip_comment(line);
    if (!blank(code)) {
      Rule rule = LineParser(code, line_number).parse();
      if (rules.find(rule.name) != nullptr) {
        throw SyntaxError(line_number, 1, "duplicate rule name \"" + rule.name + "\"");
      }
      rules.add(std::move(rule));
    }
    start = end + 1;
  }
  return rules;
}

std::string format_value(const Value& v) {
  if (v.is_text() && !bare_label(v.as_text())) return quote(v.as_text());
  return v.to_string();
}

std::string format_condition(const Condition& cond) {
  std::string out = cond.subject.to_string() + " " + std::string(comparator_text(cond.op));
  if (needs_operand(cond.op) && cond.operand) out += " " + format_value(*cond.operand);
  return out;
}

std::string format_actions(const Rule& rule) {
  std::string out;
  for (const auto& a : rule.actions) {
    if (!out.empty()) out += ", ";
    out += "set " + a.target.to_string() + " = " + format_value(a.value);
  }
  return out;
}

std::string serialize_rule(const Rule& rule) {
  std::string out = "rule " + quote(rule.name);
  if (!rule.enabled) out += " disabled";
  return out + " when " + format_condition(rule.condition) + " then " + format_actions(rule);
}

std::string serialize_ruleset(const RuleSet& rules) {
  std::string out;
  for (const auto& r : rules.rules()) out += serialize_rule(r) + "\n";
  return out;
}

RuleSet load_ruleset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read rules " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_ruleset(ss.str());
  } catch (const SyntaxError& e) {
    throw SyntaxError(e.line(), e.column(), e.reason(), path);
  }
}

}  // namespace officetwin
