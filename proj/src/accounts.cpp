#include "officetwin/accounts.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <algorithm>
#include <array>

#include "officetwin/error.hpp"

namespace officetwin {

namespace {

constexpr std::size_t kSaltBytes = 16;
constexpr std::size_t kDigestBytes = 32;
const char* const kBadCredentials = "invalid username or password";

std::string to_hex(const unsigned char* data, std::size_t n) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    out += digits[data[i] >> 4];
    out += digits[data[i] & 0xf];
  }
  return out;
}

std::vector<unsigned char> from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) throw Error(ErrorCode::schema, "odd-length hex string");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw Error(ErrorCode::schema, "invalid hex digit");
  };
  std::vector<unsigned char> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<unsigned char>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  }
  return out;
}

void random_bytes(unsigned char* out, std::size_t n) {
  if (RAND_bytes(out, static_cast<int>(n)) != 1) {
    throw Error(ErrorCode::io, "random number generator failure");
  }
}

std::array<unsigned char, kDigestBytes> pbkdf2(const std::string& password,
                                               const std::vector<unsigned char>& salt,
                                               std::uint32_t iterations) {
  std::array<unsigned char, kDigestBytes> out{};
  if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()), salt.data(),
                        static_cast<int>(salt.size()), static_cast<int>(iterations), EVP_sha256(),
                        static_cast<int>(out.size()), out.data()) != 1) {
    throw Error(ErrorCode::io, "password hashing failed");
  }
  return out;
}

void check_username(const std::string& u) {
  if (u.empty() || u.size() > 64) throw Error(ErrorCode::bad_request, "username must be 1-64 characters");
  for (char c : u) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '-' || c == '.';
    if (!ok) throw Error(ErrorCode::bad_request, "username may contain only letters, digits, '_', '-', '.'");
  }
}

void check_password(const std::string& p) {
  if (p.empty() || p.size() > 256) throw Error(ErrorCode::bad_request, "password must be 1-256 characters");
}

}  // namespace

std::string_view role_name(Role r) { return r == Role::admin ? "admin" : "viewer"; }

Role parse_role(std::string_view s) {
  if (s == "admin") return Role::admin;
  if (s == "viewer") return Role::viewer;
  throw Error(ErrorCode::bad_request, "role must be 'admin' or 'viewer'", std::string(s));
}

nlohmann::ordered_json Account::public_json() const {
  return {{"username", username},
          {"role", role_name(role)},
          {"must_change_password", must_change_password}};
}

std::string random_token() {
  unsigned char raw[16];
  random_bytes(raw, sizeof raw);
  unsigned char b64[32];
  int n = EVP_EncodeBlock(b64, raw, sizeof raw);
  std::string out(reinterpret_cast<char*>(b64), static_cast<std::size_t>(n));
  while (!out.empty() && out.back() == '=') out.pop_back();
  std::replace(out.begin(), out.end(), '+', '-');
  std::replace(out.begin(), out.end(), '/', '_');
  return out;
}

AccountStore::AccountStore(AccountOptions options) : options_(std::move(options)) {
  unsigned char junk[16];
  random_bytes(junk, sizeof junk);
  dummy_ = make_account("-", to_hex(junk, sizeof junk), Role::viewer);
}

Account AccountStore::make_account(const std::string& username, const std::string& password,
                                   Role role) const {
  std::vector<unsigned char> salt(kSaltBytes);
  random_bytes(salt.data(), salt.size());
  auto digest = pbkdf2(password, salt, options_.iterations);
  return {username, role, to_hex(salt.data(), salt.size()), to_hex(digest.data(), digest.size()),
          options_.iterations, false};
}

bool AccountStore::verify(const Account& a, const std::string& password) const {
  auto digest = pbkdf2(password, from_hex(a.salt), a.iterations);
  auto expected = from_hex(a.digest);
  return expected.size() == digest.size() &&
         CRYPTO_memcmp(expected.data(), digest.data(), digest.size()) == 0;
}

bool AccountStore::bootstrap() {
  std::lock_guard lock(mutex_);
  if (!accounts_.empty()) return false;
  auto admin = make_account("admin", "admin", Role::admin);
  admin.must_change_password = true;
  accounts_.emplace(admin.username, admin);
  return true;
}

Session AccountStore::authenticate(const std::string& username, const std::string& password) {
  std::optional<Account> account;
  {
    std::lock_guard lock(mutex_);
    if (auto it = accounts_.find(username); it != accounts_.end()) account = it->second;
  }
  // hash even for unknown users so timing does not reveal which part was wrong
  bool ok = verify(account ? *account : dummy_, password) && account.has_value();
  if (!ok) throw Error(ErrorCode::auth, kBadCredentials);

  Session s{random_token(), account->username, account->role,
            options_.clock() + options_.session_ttl, account->must_change_password};
  std::lock_guard lock(mutex_);
  sessions_[s.token] = s;
  return s;
}

Session AccountStore::validate(const std::string& token) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(token);
  if (it == sessions_.end()) throw Error(ErrorCode::auth, "missing or invalid token");
  if (options_.clock() >= it->second.expires_at) {
    sessions_.erase(it);
    throw Error(ErrorCode::auth, "session expired");
  }
  auto acc = accounts_.find(it->second.username);
  if (acc == accounts_.end()) {
    sessions_.erase(it);
    throw Error(ErrorCode::auth, "missing or invalid token");
  }
  it->second.role = acc->second.role;
  it->second.must_change_password = acc->second.must_change_password;
  return it->second;
}

void AccountStore::logout(const std::string& token) {
  std::lock_guard lock(mutex_);
  sessions_.erase(token);
}

Account AccountStore::create_account(const Session& caller, const std::string& username,
                                     const std::string& password, Role role) {
  if (caller.role != Role::admin) throw Error(ErrorCode::permission, "only admins may create accounts");
  check_username(username);
  check_password(password);
  auto account = make_account(username, password, role);
  std::lock_guard lock(mutex_);
  if (!accounts_.emplace(username, account).second) {
    throw Error(ErrorCode::conflict, "account '" + username + "' already exists", username);
  }
  return account;
}

void AccountStore::change_password(const Session& caller, const std::string& username,
                                   const std::optional<std::string>& current,
                                   const std::string& replacement) {
  const bool self = caller.username == username;
  if (!self && caller.role != Role::admin) {
    throw Error(ErrorCode::permission, "cannot change another user's password");
  }
  check_password(replacement);
  std::optional<Account> existing = find(username);
  if (!existing) throw Error(ErrorCode::not_found, "no account '" + username + "'", username);
  if (self) {
    if (!current) throw Error(ErrorCode::bad_request, "current_password is required", "current_password");
    if (!verify(*existing, *current)) {
      throw Error(ErrorCode::auth, "current password is incorrect");
    }
    if (verify(*existing, replacement)) {
      throw Error(ErrorCode::bad_request, "new password must differ from the current one");
    }
  }
  auto updated = make_account(username, replacement, existing->role);
  updated.must_change_password = !self;  // an admin reset forces the owner to pick their own
  std::lock_guard lock(mutex_);
  accounts_[username] = updated;
  std::erase_if(sessions_, [&](const auto& kv) {
    return kv.second.username == username && kv.first != caller.token;
  });
}

std::vector<Account> AccountStore::accounts() const {
  std::lock_guard lock(mutex_);
  std::vector<Account> out;
  for (const auto& [name, a] : accounts_) out.push_back(a);
  return out;
}

std::optional<Account> AccountStore::find(const std::string& username) const {
  std::lock_guard lock(mutex_);
  auto it = accounts_.find(username);
  if (it == accounts_.end()) return std::nullopt;
  return it->second;
}

nlohmann::ordered_json AccountStore::to_json() const {
  auto list = nlohmann::ordered_json::array();
  for (const auto& a : accounts()) {
    list.push_back({{"username", a.username},
                    {"role", role_name(a.role)},
                    {"salt", a.salt},
                    {"digest", a.digest},
                    {"iterations", a.iterations},
                    {"must_change_password", a.must_change_password}});
  }
  return list;
}

void AccountStore::restore(const nlohmann::json& j) {
  std::map<std::string, Account> accounts;
  try {
    for (const auto& aj : j) {
      Account a{aj.at("username").get<std::string>(), parse_role(aj.at("role").get<std::string>()),
                aj.at("salt").get<std::string>(), aj.at("digest").get<std::string>(),
                aj.at("iterations").get<std::uint32_t>(), aj.value("must_change_password", false)};
      from_hex(a.salt);
      if (from_hex(a.digest).size() != kDigestBytes || a.iterations == 0) {
        throw Error(ErrorCode::schema, "account '" + a.username + "' has an invalid digest");
      }
      if (!accounts.emplace(a.username, a).second) {
        throw Error(ErrorCode::schema, "duplicate account '" + a.username + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::schema, std::string("malformed accounts: ") + e.what());
  }
  std::lock_guard lock(mutex_);
  accounts_ = std::move(accounts);
  sessions_.clear();
}

}  // namespace officetwin
