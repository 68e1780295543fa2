#include "cathode/service/session_store.hpp"

#include <fstream>

#include "cathode/error.hpp"

namespace cathode {
namespace {

std::filesystem::path sessions_root(const EngineConfig& config) { return config.data_dir / "sessions"; }

std::string format_id(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "s%04zu", n);
  return buf;
}

std::size_t parse_id(const std::string& id) {
  if (id.size() < 2 || id[0] != 's') return 0;
  try {
    return std::stoul(id.substr(1));
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace

SessionStore::SessionStore(EngineConfig config)
    : config_(std::move(config)),
      snapshot_(load_configured_snapshot(config_)),
      registry_(make_registry(config_)) {
  std::error_code ec;
  std::filesystem::create_directories(sessions_root(config_), ec);
  if (ec) throw Error(ErrorKind::ConfigInvalid, "data_dir not writable: " + ec.message());
  for (const auto& m : snapshot_->malformed()) {
    warnings_.push_back(snapshot_->origin() + ":" + std::to_string(m.line_number) + ": " + m.reason);
  }
}

std::unique_ptr<LlmBackend> SessionStore::backend_for(const SessionState& state) const {
  if (config_.backend.kind == BackendSelection::Kind::None) return nullptr;
  auto backend = make_backend(config_);
  if (auto* scripted = dynamic_cast<ScriptedBackend*>(backend.get())) scripted->seek(state.llm_exchanges);
  return backend;
}

std::vector<std::string> SessionStore::recover() {
  std::vector<std::string> recovered;
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(sessions_root(config_))) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "events.jsonl")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    const std::string id = dir.filename().string();
    EventLogRead log;
    std::unique_ptr<Session> session;
    try {
      log = read_event_log(dir / "events.jsonl", true);
      session = Session::replay(id, log.events, config_.make_clock(),
                                std::make_shared<FileEventLog>(dir / "events.jsonl"));
    } catch (const Error& e) {
      throw Error(ErrorKind::UnrecoverableLog, "session " + id + ": " + e.what());
    }
    if (log.truncated_tail) warnings_.push_back(log.warning);
    if (log.events.empty()) {
      warnings_.push_back("session " + id + ": empty log skipped");
      continue;
    }
    auto api = std::make_shared<ApiSession>();
    api->backend = backend_for(session->state());
    api->session = std::move(session);
    api->dir = dir;
    write_state(*api);
    std::lock_guard lock(mutex_);
    sessions_[id] = api;
    next_id_ = std::max(next_id_, parse_id(id) + 1);
    recovered.push_back(id);
  }
  return recovered;
}

std::string SessionStore::create(const SessionConfig& config, const Formula& seed) {
  std::string id;
  std::filesystem::path dir;
  {
    std::lock_guard lock(mutex_);
    do {
      id = format_id(next_id_++);
      dir = sessions_root(config_) / id;
    } while (std::filesystem::exists(dir));
    std::filesystem::create_directories(dir);
  }
  auto api = std::make_shared<ApiSession>();
  api->dir = dir;
  try {
    api->session = start_session(id, config, seed, config_.make_clock(),
                                 std::make_shared<FileEventLog>(dir / "events.jsonl"));
  } catch (...) {
    std::filesystem::remove_all(dir);
    throw;
  }
  api->backend = backend_for(api->session->state());
  write_state(*api);
  std::lock_guard lock(mutex_);
  sessions_[id] = api;
  return id;
}

std::shared_ptr<ApiSession> SessionStore::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorKind::NotFound, "session " + id);
  return it->second;
}

std::vector<std::string> SessionStore::ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

void SessionStore::write_state(const ApiSession& api) {
  const auto target = api.dir / "state.json";
  const auto temp = api.dir / "state.json.tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << api.session->snapshot().to_json().dump(2) << '\n';
    if (!out) throw Error(ErrorKind::FileUnreadable, "cannot write " + temp.string());
  }
  std::filesystem::rename(temp, target);
}

ExplorationContext SessionStore::context(ApiSession& api) const {
  if (!api.backend) throw Error(ErrorKind::BackendUnavailable, "no LLM backend configured");
  return ExplorationContext{*api.backend, *snapshot_, *registry_, config_.metrics.weights};
}

RoundReport SessionStore::run_round(const std::string& id) {
  auto api = get(id);
  std::lock_guard lock(api->command);
  try {
    auto report = cathode::run_round(*api->session, context(*api));
    write_state(*api);
    return report;
  } catch (...) {
    write_state(*api);
    throw;
  }
}

std::vector<CandidateRecord> SessionStore::explore(const std::string& id) {
  auto api = get(id);
  std::lock_guard lock(api->command);
  auto ctx = context(*api);
  try {
    while (api->session->state().phase == SessionPhase::Exploration) {
      try {
        cathode::run_round(*api->session, ctx);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoCandidatesFound) throw;
      }
      write_state(*api);
    }
  } catch (...) {
    write_state(*api);
    throw;
  }
  write_state(*api);
  return api->session->state().output_candidates();
}

DedupResult SessionStore::dedup(const std::string& id) {
  auto api = get(id);
  std::lock_guard lock(api->command);
  auto result = run_dedup(*api->session);
  write_state(*api);
  return result;
}

RankOutcome SessionStore::rank(const std::string& id, const std::vector<OperatorVerdict>& verdicts) {
  auto api = get(id);
  std::lock_guard lock(api->command);
  if (!api->backend) throw Error(ErrorKind::BackendUnavailable, "no LLM backend configured");
  try {
    record_operator_verdicts(*api->session, verdicts);
    auto outcome = run_rank(*api->session, *api->backend, config_.metrics.valences);
    write_state(*api);
    return outcome;
  } catch (...) {
    write_state(*api);
    throw;
  }
}

void SessionStore::flag(const std::string& id, std::size_t index, bool flagged, const std::string& note) {
  auto api = get(id);
  std::lock_guard lock(api->command);
  flag_candidate(*api->session, index, flagged, note);
  write_state(*api);
}

std::string SessionStore::set_override(const std::string& id, TemplateId template_id, std::string body) {
  auto api = get(id);
  std::lock_guard lock(api->command);
  auto override_id = set_prompt_override(*api->session, template_id, std::move(body));
  write_state(*api);
  return override_id;
}

}  // namespace cathode
