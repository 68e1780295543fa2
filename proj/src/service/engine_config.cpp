#include "cathode/service/engine_config.hpp"

#include <fstream>

#include "cathode/error.hpp"

namespace cathode {
namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::ConfigInvalid, what); }

}  // namespace

void EngineConfig::validate() const {
  try {
    session.validate();
  } catch (const Error& e) {
    invalid(e.what());
  }
  if (listen_port < 0 || listen_port > 65535) invalid("listen port out of range");
  if (clock && *clock != "logical" && *clock != "system") invalid("clock must be \"logical\" or \"system\"");
  if (backend.kind == BackendSelection::Kind::Scripted && backend.transcript.empty()) {
    invalid("scripted backend needs a transcript path");
  }
  if (data_dir.empty()) invalid("data_dir is empty");
}

std::string EngineConfig::clock_name() const {
  if (clock) return *clock;
  return backend.kind == BackendSelection::Kind::Live ? "system" : "logical";
}

Clock EngineConfig::make_clock() const { return clock_name() == "system" ? system_clock() : logical_clock(); }

EngineConfig engine_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) invalid("engine config must be a JSON object");
  EngineConfig c;
  try {
    if (auto it = doc.find("snapshot"); it != doc.end() && !it->is_null()) {
      c.snapshot = resolve(base_dir, it->get<std::string>());
    }
    if (auto it = doc.find("registry"); it != doc.end()) {
      const std::string kind = it->value("kind", "mock");
      if (kind == "mock") {
        c.registry.kind = RegistrySelection::Kind::Mock;
        c.registry.known = it->value("known", std::vector<std::string>{});
      } else if (kind == "http") {
        c.registry.kind = RegistrySelection::Kind::Http;
        auto& h = c.registry.http;
        h.base_url = it->value("base_url", h.base_url);
        h.path = it->value("path", h.path);
        h.api_key_env = it->value("api_key_env", h.api_key_env);
        h.max_attempts = it->value("max_attempts", h.max_attempts);
        h.timeout = std::chrono::milliseconds(it->value("timeout_ms", static_cast<int>(h.timeout.count())));
      } else {
        invalid("registry kind must be \"mock\" or \"http\"");
      }
    }
    if (auto it = doc.find("backend"); it != doc.end()) {
      const std::string kind = it->value("kind", "");
      if (kind == "scripted") {
        c.backend.kind = BackendSelection::Kind::Scripted;
        c.backend.transcript = resolve(base_dir, it->at("transcript").get<std::string>());
      } else if (kind == "live") {
        c.backend.kind = BackendSelection::Kind::Live;
        auto& l = c.backend.live;
        l.endpoint = it->value("endpoint", l.endpoint);
        l.api_key_env = it->value("api_key_env", l.api_key_env);
        l.max_attempts = it->value("max_attempts", l.max_attempts);
        l.timeout_seconds = it->value("timeout_seconds", l.timeout_seconds);
      } else {
        invalid("backend kind must be \"scripted\" or \"live\"");
      }
    }
    if (auto it = doc.find("session"); it != doc.end()) {
      try {
        c.session = session_config_from_json(*it);
      } catch (const Error& e) {
        invalid(e.what());
      }
    }
    if (auto it = doc.find("data_dir"); it != doc.end()) c.data_dir = resolve(base_dir, it->get<std::string>());
    if (auto it = doc.find("listen"); it != doc.end()) {
      c.listen_host = it->value("host", c.listen_host);
      c.listen_port = it->value("port", c.listen_port);
    }
    if (auto it = doc.find("clock"); it != doc.end()) c.clock = it->get<std::string>();
    for (const char* key : {"valences", "distance_weights", "distance_groups"}) {
      if (auto it = doc.find(key); it != doc.end()) c.metrics_doc[key] = *it;
    }
    c.metrics = metrics_from_json(c.metrics_doc);
  } catch (const nlohmann::json::exception& e) {
    invalid(e.what());
  }
  c.validate();
  return c;
}

EngineConfig load_engine_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileUnreadable, path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    invalid(path.string() + ": " + e.what());
  }
  return engine_config_from_json(doc, path.parent_path());
}

nlohmann::json to_json(const EngineConfig& c) {
  nlohmann::json doc;
  doc["snapshot"] = c.snapshot ? nlohmann::json(c.snapshot->string()) : nlohmann::json(nullptr);
  if (c.registry.kind == RegistrySelection::Kind::Mock) {
    doc["registry"] = {{"kind", "mock"}, {"known", c.registry.known}};
  } else {
    doc["registry"] = {{"kind", "http"},
                       {"base_url", c.registry.http.base_url},
                       {"path", c.registry.http.path},
                       {"api_key_env", c.registry.http.api_key_env}};
  }
  switch (c.backend.kind) {
    case BackendSelection::Kind::None: doc["backend"] = nullptr; break;
    case BackendSelection::Kind::Scripted:
      doc["backend"] = {{"kind", "scripted"}, {"transcript", c.backend.transcript.string()}};
      break;
    case BackendSelection::Kind::Live:
      doc["backend"] = {{"kind", "live"},
                        {"endpoint", c.backend.live.endpoint},
                        {"api_key_env", c.backend.live.api_key_env}};
      break;
  }
  doc["session"] = to_json(c.session);
  doc["data_dir"] = c.data_dir.string();
  doc["listen"] = {{"host", c.listen_host}, {"port", c.listen_port}};
  doc["clock"] = c.clock_name();
  for (const auto& [k, v] : c.metrics_doc.items()) doc[k] = v;
  return doc;
}

BackendSelection parse_backend_flag(const std::string& flag) {
  BackendSelection b;
  if (flag == "live") {
    b.kind = BackendSelection::Kind::Live;
  } else if (flag.rfind("scripted:", 0) == 0 && flag.size() > 9) {
    b.kind = BackendSelection::Kind::Scripted;
    b.transcript = flag.substr(9);
  } else {
    invalid("backend must be scripted:<path> or live, got '" + flag + "'");
  }
  return b;
}

std::unique_ptr<LlmBackend> make_backend(const EngineConfig& config) {
  switch (config.backend.kind) {
    case BackendSelection::Kind::Scripted:
      return std::make_unique<ScriptedBackend>(Transcript::load(config.backend.transcript));
    case BackendSelection::Kind::Live: return std::make_unique<HttpChatBackend>(config.backend.live);
    case BackendSelection::Kind::None: break;
  }
  invalid("no LLM backend configured (use --backend scripted:<path> or live)");
}

std::unique_ptr<ExternalRegistryClient> make_registry(const EngineConfig& config) {
  if (config.registry.kind == RegistrySelection::Kind::Http) {
    return std::make_unique<HttpRegistryClient>(config.registry.http);
  }
  std::vector<Formula> known;
  for (const auto& f : config.registry.known) known.push_back(Formula::parse(f));
  return std::make_unique<MockRegistry>(known);
}

std::shared_ptr<const Snapshot> load_configured_snapshot(const EngineConfig& config) {
  if (!config.snapshot) return std::make_shared<const Snapshot>();
  return std::make_shared<const Snapshot>(load_snapshot(*config.snapshot));
}

}  // namespace cathode
