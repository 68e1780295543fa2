#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "cathode/pipeline/exploitation.hpp"
#include "cathode/pipeline/exploration.hpp"
#include "cathode/service/engine_config.hpp"

namespace cathode {

// One live session with its own backend. Commands lock `command`.
struct ApiSession {
  std::unique_ptr<Session> session;
  std::unique_ptr<LlmBackend> backend;
  std::filesystem::path dir;
  std::mutex command;
};

// Sessions persisted under <data_dir>/sessions/<id>/ as events.jsonl (the
// source of truth) and state.json (derived, rewritten atomically after every
// command and every round).
class SessionStore {
 public:
  explicit SessionStore(EngineConfig config);

  // Replays every session directory. Torn final lines are cut and reported in
  // warnings(); any other damage throws UnrecoverableLog naming the session.
  std::vector<std::string> recover();

  std::string create(const SessionConfig& config, const Formula& seed);
  // Throws NotFound.
  std::shared_ptr<ApiSession> get(const std::string& id) const;
  std::vector<std::string> ids() const;
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  const EngineConfig& config() const noexcept { return config_; }

  // Commands; each takes the session's command lock and persists state.json.
  RoundReport run_round(const std::string& id);
  std::vector<CandidateRecord> explore(const std::string& id);
  DedupResult dedup(const std::string& id);
  RankOutcome rank(const std::string& id, const std::vector<OperatorVerdict>& verdicts);
  void flag(const std::string& id, std::size_t index, bool flagged, const std::string& note);
  std::string set_override(const std::string& id, TemplateId template_id, std::string body);

  static void write_state(const ApiSession& api);

 private:
  std::unique_ptr<LlmBackend> backend_for(const SessionState& state) const;
  ExplorationContext context(ApiSession& api) const;

  EngineConfig config_;
  std::shared_ptr<const Snapshot> snapshot_;
  std::unique_ptr<ExternalRegistryClient> registry_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<ApiSession>> sessions_;
  std::size_t next_id_ = 1;
  std::vector<std::string> warnings_;
};

}  // namespace cathode
