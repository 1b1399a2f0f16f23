#include "officetwin/gateway.hpp"

#include <algorithm>
#include <charconv>
#include <ctime>
#include <fstream>

#include "httplib.h"
#include "officetwin/rule_check.hpp"
#include "officetwin/rule_text.hpp"

namespace officetwin {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::auth: return 401;
    case ErrorCode::permission: return 403;
    case ErrorCode::not_found: return 404;
    case ErrorCode::conflict: return 409;
    case ErrorCode::capacity: return 503;
    case ErrorCode::io:
    case ErrorCode::oscillation:
    case ErrorCode::configuration: return 500;
    default: return 400;
  }
}

ojson error_body(const Error& e) {
  return {{"code", code_name(e.code())}, {"message", e.what()}, {"detail", e.detail()}};
}

std::optional<json> load_state(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    if (!std::filesystem::exists(path)) return std::nullopt;
    throw Error(ErrorCode::io, "cannot read state file " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::schema, path.string() + ": " + e.what());
  }
}

void save_state(const std::filesystem::path& path, const ojson& state) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << state.dump(2) << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::io, "cannot write state file " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::io, "cannot replace state file " + path.string() + ": " + ec.message());
}

namespace {

struct Route {
  bool admin = false;
  bool allow_pending_password = false;
};

void send(httplib::Response& res, int status, const ojson& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) { send(res, http_status(e.code()), error_body(e)); }

json parse_body(const httplib::Request& req) {
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::bad_request, "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::bad_request, "malformed JSON body", e.what());
  }
}

std::string string_field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::bad_request, std::string("field '") + name + "' must be a string", name);
  }
  return it->get<std::string>();
}

std::string bearer(const httplib::Request& req) {
  auto h = req.get_header_value("Authorization");
  constexpr std::string_view prefix = "Bearer ";
  if (h.size() <= prefix.size() || h.compare(0, prefix.size(), prefix) != 0) return {};
  return h.substr(prefix.size());
}

std::string iso_time(WallClock::time_point t) {
  std::time_t secs = WallClock::to_time_t(t);
  std::tm utc{};
  gmtime_r(&secs, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

ojson rule_json(const Rule& r) {
  return {{"name", r.name},
          {"enabled", r.enabled},
          {"enabled_label", r.enabled ? "Yes" : "No"},
          {"condition", format_condition(r.condition)},
          {"actions", format_actions(r)},
          {"line", serialize_rule(r)}};
}

ojson diagnostics_json(const std::vector<Diagnostic>& ds) {
  auto list = ojson::array();
  for (const auto& d : ds) {
    list.push_back({{"severity", severity_name(d.severity)},
                    {"code", d.code},
                    {"rules", d.rules},
                    {"message", d.message}});
  }
  return list;
}

ojson change_json(const StateChange& c) {
  ojson j{{"t", c.sim_time},
          {"device", c.device_id},
          {"property", c.property},
          {"old", c.old_value.to_json()},
          {"new", c.new_value.to_json()},
          {"cause", cause_name(c.cause.kind)}};
  if (!c.cause.source.empty()) j["source"] = c.cause.source;
  return j;
}

}  // namespace

Gateway::Gateway(LiveSimulation& sim, GatewayOptions options)
    : sim_(sim),
      options_(std::move(options)),
      accounts_(options_.accounts),
      server_(std::make_unique<httplib::Server>()) {
  std::optional<json> state;
  if (!options_.state_path.empty()) state = load_state(options_.state_path);
  if (state) {
    try {
      if (state->contains("accounts")) accounts_.restore(state->at("accounts"));
      if (state->contains("leases")) leases_.restore(state->at("leases"));
      if (state->contains("rules")) sim_.set_rules(parse_ruleset(state->at("rules").get<std::string>()));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::schema, "malformed state file: " + std::string(e.what()));
    }
  }
  accounts_.bootstrap();
  for (const auto& d : sim_.catalog().devices()) leases_.register_device(d, 0.0);
  persist();
  routes();
}

Gateway::~Gateway() { stop(); }

void Gateway::persist() {
  if (options_.state_path.empty()) return;
  std::lock_guard lock(persist_mutex_);
  ojson state{{"accounts", accounts_.to_json()},
              {"leases", leases_.to_json()},
              {"rules", serialize_ruleset(sim_.rules())}};
  save_state(options_.state_path, state);
}

int Gateway::bind(const std::string& host, int port) {
  if (port < 0 || port > 65535) throw Error(ErrorCode::io, "invalid port " + std::to_string(port));
  if (port == 0) {
    int bound = server_->bind_to_any_port(host);
    if (bound <= 0) throw Error(ErrorCode::io, "cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) {
    throw Error(ErrorCode::io, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void Gateway::listen() { server_->listen_after_bind(); }
void Gateway::stop() {
  if (server_) server_->stop();
}
void Gateway::wait_until_ready() const { server_->wait_until_ready(); }

void Gateway::routes() {
  auto& srv = *server_;
  srv.set_payload_max_length(1 << 20);

  using Body = std::function<void(const httplib::Request&, httplib::Response&, const Session&)>;
  auto guarded = [this](Route route, Body body) {
    return [this, route, body](const httplib::Request& req, httplib::Response& res) {
      try {
        auto session = accounts_.validate(bearer(req));
        if (session.must_change_password && !route.allow_pending_password) {
          throw Error(ErrorCode::permission, "password change required before further use",
                      "must_change_password");
        }
        if (route.admin && session.role != Role::admin) {
          throw Error(ErrorCode::permission, "admin role required");
        }
        body(req, res, session);
      } catch (const Error& e) {
        send_error(res, e);
      }
    };
  };
  const Route reader{};
  const Route admin{true, false};

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const std::exception& e) {
      send(res, 500, {{"code", "internal"}, {"message", e.what()}, {"detail", ""}});
    }
  });
  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 404) {
      send(res, 404, error_body(Error(ErrorCode::not_found, "no such endpoint")));
    } else if (res.status == 413) {
      send(res, 413, error_body(Error(ErrorCode::bad_request, "request body too large")));
    }
  });

  srv.Post("/login", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      auto body = parse_body(req);
      auto s = accounts_.authenticate(string_field(body, "username"), string_field(body, "password"));
      send(res, 200, {{"token", s.token},
                      {"username", s.username},
                      {"role", role_name(s.role)},
                      {"expires_at", iso_time(s.expires_at)},
                      {"must_change_password", s.must_change_password}});
    } catch (const Error& e) {
      send_error(res, e);
    }
  });

  srv.Post("/logout", guarded({false, true}, [this](const auto& req, auto& res, const Session&) {
             accounts_.logout(bearer(req));
             res.status = 204;
           }));

  srv.Post("/accounts", guarded(admin, [this](const auto& req, auto& res, const Session& s) {
             auto body = parse_body(req);
             auto a = accounts_.create_account(s, string_field(body, "username"),
                                               string_field(body, "password"),
                                               parse_role(body.value("role", std::string("viewer"))));
             persist();
             send(res, 201, a.public_json());
           }));

  srv.Get("/accounts", guarded(admin, [this](const auto&, auto& res, const Session&) {
            auto list = ojson::array();
            for (const auto& a : accounts_.accounts()) list.push_back(a.public_json());
            send(res, 200, {{"accounts", list}});
          }));

  srv.Put(R"(/accounts/([^/]+)/password)",
          guarded({false, true}, [this](const auto& req, auto& res, const Session& s) {
            auto body = parse_body(req);
            std::optional<std::string> current;
            if (body.contains("current_password")) current = string_field(body, "current_password");
            accounts_.change_password(s, req.matches[1], current, string_field(body, "new_password"));
            persist();
            res.status = 204;
          }));

  auto device_json = [this](const World& world, std::size_t i) {
    const auto& d = world.catalog()[i];
    const auto& st = world.state(i);
    ojson j{{"device_id", d.device_id},
            {"handle", d.handle},
            {"kind", d.kind},
            {"display_name", d.display_name},
            {"segment", d.segment}};
    auto lease = leases_.find(d.device_id);
    j["address"] = lease ? ojson(lease->address) : ojson(nullptr);
    ojson state = ojson::object();
    ojson changed = ojson::object();
    for (const auto& p : d.properties) {
      state[p.name] = st.values.at(p.name).to_json();
      changed[p.name] = st.last_changed.at(p.name);
    }
    j["state"] = std::move(state);
    j["last_changed"] = std::move(changed);
    return j;
  };

  srv.Get("/devices", guarded(reader, [this, device_json](const auto&, auto& res, const Session&) {
            auto world = sim_.world();
            auto list = ojson::array();
            for (std::size_t i = 0; i < world.catalog().size(); ++i) list.push_back(device_json(world, i));
            send(res, 200, {{"sim_time", sim_.status().sim_time}, {"devices", list}});
          }));

  srv.Get(R"(/devices/([^/]+))", guarded(reader, [this, device_json](const auto& req, auto& res, const Session&) {
            auto world = sim_.world();
            std::string ref = req.matches[1];
            auto i = world.index_of(ref);
            if (!i) throw Error(ErrorCode::not_found, "unknown device '" + ref + "'", ref);
            auto j = device_json(world, *i);
            j["properties"] = descriptor_to_json(world.catalog()[*i])["properties"];
            send(res, 200, j);
          }));

  srv.Put(R"(/devices/([^/]+)/properties/([^/]+))",
          guarded(admin, [this](const auto& req, auto& res, const Session& s) {
            auto body = parse_body(req);
            if (!body.contains("value")) throw Error(ErrorCode::bad_request, "field 'value' is required", "value");
            auto value = Value::from_json(body.at("value"));
            std::string device = req.matches[1];
            std::string property = req.matches[2];
            auto world = sim_.world();
            auto i = world.index_of(device);
            if (!i) throw Error(ErrorCode::not_found, "unknown device '" + device + "'", device);
            check_write(world.catalog()[*i], property, value, Cause::command(s.username));

            auto future = sim_.submit({device, property, value, s.username});
            if (future.wait_for(options_.command_timeout) != std::future_status::ready) {
              throw Error(ErrorCode::capacity, "simulation did not acknowledge the command in time");
            }
            auto outcome = future.get();
            if (outcome.error) throw *outcome.error;
            ojson j{{"command", outcome.id},
                    {"change", outcome.change ? change_json(*outcome.change) : ojson(nullptr)}};
            auto after = sim_.world();
            j["value"] = after.get(*i, property).to_json();
            send(res, 200, j);
          }));

  srv.Get("/rules", guarded(reader, [this](const auto&, auto& res, const Session&) {
            auto list = ojson::array();
            auto rules = sim_.rules();
            for (const auto& r : rules.rules()) list.push_back(rule_json(r));
            send(res, 200, {{"rules", list}});
          }));

  auto rule_from_body = [](const json& body, const Rule* existing) {
    if (body.contains("rule")) return parse_rule(string_field(body, "rule"));
    if (existing && body.contains("enabled")) {
      if (!body.at("enabled").is_boolean()) throw Error(ErrorCode::bad_request, "'enabled' must be a boolean");
      Rule r = *existing;
      r.enabled = body.at("enabled").get<bool>();
      return r;
    }
    throw Error(ErrorCode::bad_request, "body must contain 'rule' (one rule line)", "rule");
  };

  auto commit_rules = [this](RuleSet rules, httplib::Response& res, int status, const Rule& rule) {
    auto diagnostics = validate(rules, sim_.catalog());
    sim_.set_rules(std::move(rules));
    persist();
    send(res, status, {{"rule", rule_json(rule)}, {"diagnostics", diagnostics_json(diagnostics)}});
  };

  srv.Post("/rules", guarded(admin, [this, rule_from_body, commit_rules](const auto& req, auto& res, const Session&) {
             auto rule = rule_from_body(parse_body(req), nullptr);
             auto rules = sim_.rules();
             rules.add(rule);
             commit_rules(std::move(rules), res, 201, rule);
           }));

  srv.Put(R"(/rules/([^/]+))", guarded(admin, [this, rule_from_body, commit_rules](const auto& req, auto& res, const Session&) {
            std::string name = req.matches[1];
            auto rules = sim_.rules();
            const Rule* existing = rules.find(name);
            if (!existing) throw Error(ErrorCode::not_found, "no rule named \"" + name + "\"", name);
            auto rule = rule_from_body(parse_body(req), existing);
            rules.replace(name, rule);
            commit_rules(std::move(rules), res, 200, rule);
          }));

  srv.Delete(R"(/rules/([^/]+))", guarded(admin, [this](const auto& req, auto& res, const Session&) {
               std::string name = req.matches[1];
               auto rules = sim_.rules();
               rules.remove(name);
               sim_.set_rules(std::move(rules));
               persist();
               res.status = 204;
             }));

  srv.Get("/events", guarded(reader, [this](const auto& req, auto& res, const Session&) {
            auto number = [&](const char* key, std::uint64_t fallback) -> std::uint64_t {
              if (!req.has_param(key)) return fallback;
              auto text = req.get_param_value(key);
              std::uint64_t v = 0;
              auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
              if (ec != std::errc() || p != text.data() + text.size()) {
                throw Error(ErrorCode::bad_request, std::string("'") + key + "' must be a non-negative integer", key);
              }
              return v;
            };
            auto after = number("after", 0);
            auto limit = std::clamp<std::uint64_t>(number("limit", 1000), 1, 10000);
            auto page = sim_.events(after, limit);
            send(res, 200, {{"events", page.events}, {"next", page.next}, {"sim_time", sim_.status().sim_time}});
          }));

  srv.Post("/stimuli", guarded(admin, [this](const auto& req, auto& res, const Session&) {
             auto body = parse_body(req);
             if (!body.contains("at")) body["at"] = 0.0;
             auto scheduled = sim_.inject(Stimulus::from_json(body));
             send(res, 202, {{"stimulus", scheduled.to_json()}});
           }));

  srv.Get("/leases", guarded(reader, [this](const auto&, auto& res, const Session&) {
            send(res, 200, {{"gateway", leases_.gateway()}, {"leases", leases_.to_json()}});
          }));

  srv.Get("/status", guarded(reader, [this](const auto&, auto& res, const Session&) {
            auto st = sim_.status();
            send(res, 200, {{"sim_time", st.sim_time},
                            {"ticks", st.ticks},
                            {"running", st.running},
                            {"finished", st.finished},
                            {"halted", st.halted ? ojson(*st.halted) : ojson(nullptr)},
                            {"environment", sim_.environment().to_json()}});
          }));

  srv.Get("/metrics/report", guarded(reader, [this](const auto&, auto& res, const Session&) {
            auto r = sim_.report(options_.profile);
            auto j = r.report.to_json();
            send(res, 200, {{"sim_time", r.sim_time},
                            {"indicators", j["indicators"]},
                            {"automated", r.automated.to_json()},
                            {"baseline", r.baseline.to_json()}});
          }));
}

}  // namespace officetwin
