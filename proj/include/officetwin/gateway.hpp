#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "json.hpp"
#include "officetwin/accounts.hpp"
#include "officetwin/error.hpp"
#include "officetwin/lease.hpp"
#include "officetwin/live.hpp"
#include "officetwin/metrics.hpp"

namespace httplib {
class Server;
}

namespace officetwin {

/// HTTP status for an error code.
int http_status(ErrorCode code);
nlohmann::ordered_json error_body(const Error& e);

/// Reads the state file; nullopt if it does not exist.
std::optional<nlohmann::json> load_state(const std::filesystem::path& path);
/// Writes to a sibling temp file and renames it over the target.
void save_state(const std::filesystem::path& path, const nlohmann::ordered_json& state);

struct GatewayOptions {
  std::filesystem::path state_path;  // empty: keep state in memory only
  AccountOptions accounts;
  PowerProfile profile = default_profile();
  std::chrono::milliseconds command_timeout{10000};
};

/// The office IoT server: device registry with leases, accounts and the HTTP/JSON API.
class Gateway {
 public:
  /// Loads or initializes the state file. Persisted rules replace the simulation's.
  Gateway(LiveSimulation& sim, GatewayOptions options);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws Error(io) on failure.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  void stop();
  void wait_until_ready() const;

  AccountStore& accounts() noexcept { return accounts_; }
  LeasePool& leases() noexcept { return leases_; }

 private:
  void routes();
  void persist();

  LiveSimulation& sim_;
  GatewayOptions options_;
  AccountStore accounts_;
  LeasePool leases_;
  std::mutex persist_mutex_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace officetwin
