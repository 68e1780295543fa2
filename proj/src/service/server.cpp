#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "cathode/service/server.hpp"

#include <httplib.h>

#include <algorithm>

#include "cathode/pipeline/ranking.hpp"

namespace cathode {
namespace {

constexpr auto kJson = "application/json";
constexpr std::int64_t kMaxPollMs = 30000;

void reply(httplib::Response& res, int status, nlohmann::json body) {
  body["api_version"] = kApiVersion;
  res.status = status;
  res.set_content(body.dump(), kJson);
}

nlohmann::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  try {
    auto doc = nlohmann::json::parse(req.body);
    if (!doc.is_object()) throw Error(ErrorKind::InvalidArgument, "request body must be a JSON object");
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed JSON body: ") + e.what());
  }
}

template <class T>
T field(const nlohmann::json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::InvalidArgument, std::string("missing or mistyped field '") + key + "'");
  }
}

std::size_t query_number(const httplib::Request& req, const char* key, std::size_t fallback) {
  if (!req.has_param(key)) return fallback;
  const auto text = req.get_param_value(key);
  try {
    std::size_t used = 0;
    const auto v = std::stoll(text, &used);
    if (used != text.size() || v < 0) throw std::invalid_argument(key);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidArgument, std::string("query parameter '") + key + "' must be a nonnegative integer");
  }
}

nlohmann::json report_json(const RoundReport& r) {
  return {{"ran", r.ran},
          {"task", r.task},
          {"tree", r.tree},
          {"cycle", r.cycle},
          {"round", r.round},
          {"template", r.ran ? nlohmann::json(to_string(r.template_id)) : nlohmann::json(nullptr)},
          {"override_id", r.override_id ? nlohmann::json(*r.override_id) : nlohmann::json(nullptr)},
          {"candidates", r.candidates},
          {"valid_added", r.valid_added},
          {"task_complete", r.task_complete},
          {"exploration_complete", r.exploration_complete}};
}

nlohmann::json candidates_json(const std::vector<CandidateRecord>& list) {
  auto out = nlohmann::json::array();
  for (const auto& c : list) out.push_back(to_json(c));
  return out;
}

// Runs handler, mapping domain errors onto status codes.
template <class Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const RankingInterrupted& e) {
      auto body = error_body(e);
      body["error"]["pair"] = {e.first().render(), e.second().render()};
      body["error"]["last_response"] = e.last_response();
      body["partial"] = to_json(e.partial());
      reply(res, http_status(e.kind()), body);
    } catch (const Error& e) {
      reply(res, http_status(e.kind()), error_body(e));
    } catch (const std::exception& e) {
      reply(res, 500, {{"error", {{"kind", "Internal"}, {"message", e.what()}}}});
    }
  };
}

}  // namespace

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotFound: return 404;
    case ErrorKind::InvalidPhase:
    case ErrorKind::RoundBudgetExhausted:
    case ErrorKind::ComparatorFailure:
    case ErrorKind::AmbiguousWinner:
    case ErrorKind::NoMarkedLine: return 409;
    case ErrorKind::NoCandidatesFound: return 422;
    case ErrorKind::TranscriptDrift:
    case ErrorKind::TranscriptExhausted:
    case ErrorKind::BackendUnavailable:
    case ErrorKind::RegistryUnavailable: return 502;
    case ErrorKind::FileUnreadable:
    case ErrorKind::UnrecoverableLog:
    case ErrorKind::BindFailure:
    case ErrorKind::ConfigInvalid:
    case ErrorKind::AllRecordsMalformed: return 500;
    default: return 400;
  }
}

nlohmann::json error_body(const Error& error) {
  return {{"error", {{"kind", to_string(error.kind())}, {"message", error.what()}}}, {"api_version", kApiVersion}};
}

ApiServer::ApiServer(SessionStore& store) : store_(store), http_(std::make_unique<httplib::Server>()) {
  // httplib's default adds SO_REUSEPORT, which lets a second server share an
  // occupied port instead of failing.
  http_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  routes();
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = http_->bind_to_any_port(host);
    if (port_ <= 0) throw Error(ErrorKind::BindFailure, "cannot bind " + host);
  } else {
    if (!http_->bind_to_port(host, port)) {
      throw Error(ErrorKind::BindFailure, "cannot bind " + host + ":" + std::to_string(port));
    }
    port_ = port;
  }
  return port_;
}

void ApiServer::run() { http_->listen_after_bind(); }

void ApiServer::stop() {
  if (http_ && http_->is_running()) http_->stop();
}

void ApiServer::routes() {
  auto& s = *http_;
  SessionStore& store = store_;

  s.Get("/healthz", guarded([&store](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, {{"status", "ok"}, {"sessions", store.ids().size()}});
  }));

  s.Post("/sessions", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    const Formula seed = Formula::parse(body.value("seed", "LiNi0.8Mn0.1Co0.1O2"));
    SessionConfig config = store.config().session;
    if (auto it = body.find("config"); it != body.end()) config = session_config_from_json(*it, config);
    const auto id = store.create(config, seed);
    reply(res, 201, {{"session", store.get(id)->session->snapshot().summary()}});
  }));

  s.Get("/sessions", guarded([&store](const httplib::Request&, httplib::Response& res) {
    auto list = nlohmann::json::array();
    for (const auto& id : store.ids()) list.push_back(store.get(id)->session->snapshot().summary());
    reply(res, 200, {{"sessions", list}});
  }));

  s.Get(R"(/sessions/([^/]+))", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    // Kept out of the initializer list: GCC 11 leaks list elements when a
    // later one throws.
    auto state = store.get(req.matches[1])->session->snapshot().to_json();
    reply(res, 200, {{"session", std::move(state)}});
  }));

  s.Post(R"(/sessions/([^/]+)/rounds)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    auto report = store.run_round(id);
    reply(res, 200, {{"report", report_json(report)}, {"session", store.get(id)->session->snapshot().summary()}});
  }));

  s.Post(R"(/sessions/([^/]+)/explore)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    auto output = store.explore(id);
    reply(res, 200,
          {{"candidates", candidates_json(output)}, {"session", store.get(id)->session->snapshot().summary()}});
  }));

  s.Post(R"(/sessions/([^/]+)/dedup)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    auto result = store.dedup(id);
    auto removed = nlohmann::json::array();
    for (const auto& r : result.removed) removed.push_back({{"index", r.index}, {"duplicate_of", r.duplicate_of}});
    reply(res, 200, {{"unique", result.unique},
                     {"removed", removed},
                     {"session", store.get(id)->session->snapshot().summary()}});
  }));

  s.Post(R"(/sessions/([^/]+)/rank)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const auto body = parse_body(req);
    std::vector<OperatorVerdict> verdicts;
    if (auto it = body.find("verdicts"); it != body.end()) {
      if (!it->is_array()) throw Error(ErrorKind::InvalidArgument, "verdicts must be an array");
      for (const auto& v : *it) {
        verdicts.push_back({Formula::parse(field<std::string>(v, "a")), Formula::parse(field<std::string>(v, "b")),
                            Formula::parse(field<std::string>(v, "winner")), v.value("note", "operator verdict")});
      }
    }
    auto outcome = store.rank(id, verdicts);
    reply(res, 200, {{"outcome", to_json(outcome)}, {"session", store.get(id)->session->snapshot().summary()}});
  }));

  s.Get(R"(/sessions/([^/]+)/candidates)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    const auto state = store.get(req.matches[1])->session->snapshot();
    std::vector<CandidateRecord> list = state.candidates;
    if (req.has_param("status")) {
      const auto status = candidate_status_from_string(req.get_param_value("status"));
      std::erase_if(list, [&](const CandidateRecord& c) { return c.status != status; });
    }
    reply(res, 200, {{"candidates", candidates_json(list)}, {"funnel", state.funnel()}});
  }));

  s.Post(R"(/sessions/([^/]+)/candidates/(\d+)/flag)",
         guarded([&store](const httplib::Request& req, httplib::Response& res) {
           const std::string id = req.matches[1];
           const auto index = static_cast<std::size_t>(std::stoull(req.matches[2]));
           const auto body = parse_body(req);
           store.flag(id, index, body.value("flagged", true), body.value("note", ""));
           auto candidate = to_json(store.get(id)->session->snapshot().candidates.at(index));
           reply(res, 200, {{"candidate", std::move(candidate)}});
         }));

  s.Put(R"(/sessions/([^/]+)/prompt-override)",
        guarded([&store](const httplib::Request& req, httplib::Response& res) {
          const std::string id = req.matches[1];
          const auto body = parse_body(req);
          const auto tid = template_id_from_string(field<std::string>(body, "template"));
          const auto override_id = store.set_override(id, tid, field<std::string>(body, "body"));
          reply(res, 200, {{"override_id", override_id}, {"template", to_string(tid)}});
        }));

  s.Get(R"(/sessions/([^/]+)/events)", guarded([&store](const httplib::Request& req, httplib::Response& res) {
    auto api = store.get(req.matches[1]);
    const auto after = query_number(req, "after", 0);
    const auto timeout = std::min<std::int64_t>(static_cast<std::int64_t>(query_number(req, "timeout_ms", 0)), kMaxPollMs);
    auto events = api->session->wait_for_events(after, std::chrono::milliseconds(timeout));
    auto list = nlohmann::json::array();
    for (const auto& e : events) list.push_back(to_json(e));
    const std::uint64_t next = events.empty() ? after : events.back().seq;
    reply(res, 200, {{"events", list}, {"next", next}});
  }));
}

}  // namespace cathode
