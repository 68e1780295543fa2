#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "cathode/knowledge/registry.hpp"

#include <httplib.h>

#include <cstdlib>
#include <nlohmann/json.hpp>

#include "cathode/error.hpp"

namespace cathode {

MockRegistry::MockRegistry(const std::vector<Formula>& known) {
  for (const auto& f : known) keys_.insert(f.canonical_key());
}

void MockRegistry::add(const Formula& f) {
  std::lock_guard lock(mutex_);
  keys_.insert(f.canonical_key());
}

bool MockRegistry::exists(const Formula& f) {
  std::lock_guard lock(mutex_);
  return keys_.contains(f.canonical_key());
}

std::size_t MockRegistry::size() const {
  std::lock_guard lock(mutex_);
  return keys_.size();
}

HttpRegistryClient::HttpRegistryClient(HttpRegistrySettings settings) : settings_(std::move(settings)) {
  if (settings_.max_attempts < 1) settings_.max_attempts = 1;
}

bool HttpRegistryClient::exists(const Formula& f) {
  std::lock_guard lock(mutex_);
  const char* key = std::getenv(settings_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw Error(ErrorKind::RegistryUnavailable, "environment variable " + settings_.api_key_env + " is not set");
  }

  httplib::Client client(settings_.base_url);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(settings_.timeout);
  client.set_connection_timeout(seconds);
  client.set_read_timeout(seconds);
  const httplib::Headers headers{{"X-API-KEY", key}, {"Accept", "application/json"}};
  const httplib::Params params{{"formula", f.render()}, {"_fields", "material_id"}};

  std::string last_error;
  for (int attempt = 0; attempt < settings_.max_attempts; ++attempt) {
    auto res = client.Get(settings_.path, params, headers);
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorKind::RegistryUnavailable, "HTTP " + std::to_string(res->status));
    }
    const auto doc = nlohmann::json::parse(res->body, nullptr, false);
    if (doc.is_discarded() || !doc.contains("data") || !doc["data"].is_array()) {
      throw Error(ErrorKind::RegistryUnavailable, "unexpected registry response");
    }
    return !doc["data"].empty();
  }
  throw Error(ErrorKind::RegistryUnavailable, last_error);
}

}  // namespace cathode
