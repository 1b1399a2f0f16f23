#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace officetwin {

enum class Role { admin, viewer };

std::string_view role_name(Role r);
/// Throws Error(bad_request) for anything but "admin" / "viewer".
Role parse_role(std::string_view s);

struct Account {
  std::string username;
  Role role = Role::viewer;
  std::string salt;    // hex
  std::string digest;  // hex, PBKDF2-HMAC-SHA256
  std::uint32_t iterations = 0;
  bool must_change_password = false;

  /// Public view; never contains salt or digest.
  nlohmann::ordered_json public_json() const;
};

using WallClock = std::chrono::system_clock;
using ClockFn = std::function<WallClock::time_point()>;

struct Session {
  std::string token;
  std::string username;
  Role role = Role::viewer;
  WallClock::time_point expires_at;
  bool must_change_password = false;
};

/// 128 random bits, base64url without padding.
std::string random_token();

struct AccountOptions {
  std::chrono::seconds session_ttl{30 * 60};
  std::uint32_t iterations = 100000;
  ClockFn clock = [] { return WallClock::now(); };
};

/// Accounts and live sessions. Thread-safe.
class AccountStore {
 public:
  explicit AccountStore(AccountOptions options = {});

  /// Creates admin/admin (flagged for a forced password change) if there are no accounts.
  bool bootstrap();

  /// Throws Error(auth) with the same message whatever was wrong.
  Session authenticate(const std::string& username, const std::string& password);
  /// Throws Error(auth) for unknown or expired tokens.
  Session validate(const std::string& token);
  void logout(const std::string& token);

  /// Admin only (permission error otherwise); conflict on a duplicate username.
  Account create_account(const Session& caller, const std::string& username,
                         const std::string& password, Role role);
  /// Users may change their own password by giving the current one; admins
  /// may reset anyone's. Existing sessions of that user are revoked except the caller's.
  void change_password(const Session& caller, const std::string& username,
                       const std::optional<std::string>& current, const std::string& replacement);

  std::vector<Account> accounts() const;
  std::optional<Account> find(const std::string& username) const;

  nlohmann::ordered_json to_json() const;
  void restore(const nlohmann::json& j);

 private:
  Account make_account(const std::string& username, const std::string& password, Role role) const;
  bool verify(const Account& a, const std::string& password) const;

  AccountOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, Account> accounts_;
  std::map<std::string, Session> sessions_;
  Account dummy_;  // verified against when the username is unknown
};

}  // namespace officetwin
