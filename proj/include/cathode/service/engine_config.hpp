#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cathode/knowledge/registry.hpp"
#include "cathode/knowledge/snapshot.hpp"
#include "cathode/llm/backend.hpp"
#include "cathode/metrics/overrides.hpp"
#include "cathode/pipeline/config.hpp"
#include "cathode/pipeline/events.hpp"

namespace cathode {

struct BackendSelection {
  enum class Kind { None, Scripted, Live };
  Kind kind = Kind::None;
  std::filesystem::path transcript;  // Scripted
  HttpChatSettings live;             // Live
};

struct RegistrySelection {
  enum class Kind { Mock, Http };
  Kind kind = Kind::Mock;
  std::vector<std::string> known;  // Mock: formulas reported as existing
  HttpRegistrySettings http;
};

// Engine settings, loaded from a JSON file:
//
//   {
//     "snapshot": "data/icsd_li.csv",
//     "registry": {"kind": "mock", "known": ["LiCoO2"]}
//              or {"kind": "http", "base_url": "...", "path": "...", "api_key_env": "MP_API_KEY"},
//     "backend":  {"kind": "scripted", "transcript": "run.jsonl"}
//              or {"kind": "live", "endpoint": "...", "api_key_env": "OPENAI_API_KEY"},
//     "session":  {"k": 5, "cycles": 2, "trees": 4, ...},
//     "data_dir": "var",
//     "listen":   {"host": "127.0.0.1", "port": 8080},
//     "clock":    "logical" | "system",
//     "valences": {...}, "distance_weights": [...], "distance_groups": [...]
//   }
//
// Relative paths are resolved against the file's directory.
struct EngineConfig {
  std::optional<std::filesystem::path> snapshot;
  RegistrySelection registry;
  BackendSelection backend;
  SessionConfig session;
  std::filesystem::path data_dir = "cathode-data";
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  // Defaults to "logical" for scripted backends and "system" otherwise.
  std::optional<std::string> clock;
  MetricsConfig metrics;
  nlohmann::json metrics_doc = nlohmann::json::object();  // as given, for to_json

  // Throws ConfigInvalid.
  void validate() const;
  Clock make_clock() const;
  std::string clock_name() const;
};

EngineConfig engine_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
// Throws FileUnreadable or ConfigInvalid.
EngineConfig load_engine_config(const std::filesystem::path& path);
nlohmann::json to_json(const EngineConfig& config);

// "scripted:<path>" or "live". Throws ConfigInvalid.
BackendSelection parse_backend_flag(const std::string& flag);

// Fresh backend for one session; scripted backends start at the transcript
// head. Throws ConfigInvalid when no backend is configured.
std::unique_ptr<LlmBackend> make_backend(const EngineConfig& config);
std::unique_ptr<ExternalRegistryClient> make_registry(const EngineConfig& config);
// Empty snapshot when none is configured.
std::shared_ptr<const Snapshot> load_configured_snapshot(const EngineConfig& config);

}  // namespace cathode
