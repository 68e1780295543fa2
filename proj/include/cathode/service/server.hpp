#pragma once

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "cathode/error.hpp"
#include "cathode/service/session_store.hpp"

namespace httplib {
class Server;
}

namespace cathode {

inline constexpr int kApiVersion = 1;

// HTTP status for a domain error.
int http_status(ErrorKind kind);
nlohmann::json error_body(const Error& error);

// JSON API over a SessionStore:
//
//   GET  /healthz
//   POST /sessions                         {"seed": "...", "config": {...}}
//   GET  /sessions
//   GET  /sessions/{id}
//   POST /sessions/{id}/rounds             one round
//   POST /sessions/{id}/explore            rounds until the exploration closes
//   POST /sessions/{id}/dedup
//   POST /sessions/{id}/rank               {"verdicts": [{"a": .., "b": .., "winner": .., "note": ..}]}
//   GET  /sessions/{id}/candidates         ?status=valid
//   POST /sessions/{id}/candidates/{idx}/flag   {"flagged": true, "note": "..."}
//   PUT  /sessions/{id}/prompt-override    {"template": "...", "body": "..."}
//   GET  /sessions/{id}/events             ?after=n&timeout_ms=t (long poll, t <= 30000)
//
// Every response carries "api_version".
class ApiServer {
 public:
  explicit ApiServer(SessionStore& store);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws BindFailure.
  int bind(const std::string& host, int port);
  // Serves until stop().
  void run();
  void stop();
  int port() const noexcept { return port_; }

 private:
  void routes();

  SessionStore& store_;
  std::unique_ptr<httplib::Server> http_;
  int port_ = 0;
};

}  // namespace cathode
