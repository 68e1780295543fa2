#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "cathode/formula/formula.hpp"

namespace cathode {

// Read-only existence lookup against an external materials registry.
class ExternalRegistryClient {
 public:
  virtual ~ExternalRegistryClient() = default;
  virtual bool exists(const Formula& f) = 0;
};

// Fixed set of known formulas, compared canonically. Never fails.
class MockRegistry final : public ExternalRegistryClient {
 public:
  MockRegistry() = default;
  explicit MockRegistry(const std::vector<Formula>& known);

  void add(const Formula& f);
  bool exists(const Formula& f) override;
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::set<std::string> keys_;
};

struct HttpRegistrySettings {
  std::string base_url = "https://api.materialsproject.org";
  std::string path = "/materials/summary/";
  std::string api_key_env = "MP_API_KEY";
  int max_attempts = 3;
  std::chrono::milliseconds timeout{10000};
};

// Materials-Project-style REST adapter: GET <path>?formula=<f>, existence
// means a non-empty "data" array. Requests are serialized; transport errors
// are retried up to max_attempts, then RegistryUnavailable is thrown.
class HttpRegistryClient final : public ExternalRegistryClient {
 public:
  explicit HttpRegistryClient(HttpRegistrySettings settings);
  bool exists(const Formula& f) override;

 private:
  HttpRegistrySettings settings_;
  std::mutex mutex_;
};

inline bool exists_exact(const Formula& f, ExternalRegistryClient& client) { return client.exists(f); }

}  // namespace cathode
