#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "officetwin/gateway.hpp"
#include "officetwin/live.hpp"
#include "support/office.hpp"

namespace office {

/// A gateway on an ephemeral port over a fast-ticking live simulation.
struct TestServer {
  explicit TestServer(std::filesystem::path state = {}, RuleSet rules = default_rules(),
                      std::chrono::milliseconds tick = std::chrono::milliseconds(5)) {
    Scenario s;
    s.name = "live";
    s.duration = 1e9;
    s.snapshot_every = 0;
    sim = std::make_unique<LiveSimulation>(s, catalog(), std::move(rules), tick);
    GatewayOptions options;
    options.state_path = std::move(state);
    options.accounts.iterations = 1000;
    gateway = std::make_unique<Gateway>(*sim, options);
    port = gateway->bind("127.0.0.1", 0);
    thread = std::thread([this] { gateway->listen(); });
    gateway->wait_until_ready();
    sim->start();
  }

  ~TestServer() {
    gateway->stop();
    thread.join();
    sim->stop();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(20, 0);
    return c;
  }

  struct Reply {
    int status = 0;
    nlohmann::json body;
  };

  Reply call(const std::string& method, const std::string& path, const std::string& token = {},
             const nlohmann::json& body = nullptr) const {
    auto c = client();
    httplib::Headers headers;
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
    std::string payload = body.is_null() ? std::string("{}") : body.dump();
    httplib::Result r;
    if (method == "GET") r = c.Get(path, headers);
    else if (method == "POST") r = c.Post(path, headers, payload, "application/json");
    else if (method == "PUT") r = c.Put(path, headers, payload, "application/json");
    else if (method == "DELETE") r = c.Delete(path, headers);
    if (!r) return {-1, nullptr};
    Reply out{r->status, nullptr};
    if (!r->body.empty()) out.body = nlohmann::json::parse(r->body, nullptr, false);
    return out;
  }

  std::string login(const std::string& user, const std::string& password) const {
    auto r = call("POST", "/login", {}, {{"username", user}, {"password", password}});
    if (r.status != 200) return {};
    return r.body["token"].get<std::string>();
  }

  /// Logs in as admin and completes the forced password change.
  std::string admin(const std::string& password = "s3cret") const {
    auto t = login("admin", "admin");
    if (t.empty()) return login("admin", password);
    call("PUT", "/accounts/admin/password", t, {{"current_password", "admin"}, {"new_password", password}});
    return t;
  }

  std::unique_ptr<LiveSimulation> sim;
  std::unique_ptr<Gateway> gateway;
  int port = 0;
  std::thread thread;
};

}  // namespace office
