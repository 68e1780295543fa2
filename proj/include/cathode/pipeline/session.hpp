#pragma once

#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cathode/llm/comparator.hpp"
#include "cathode/pipeline/candidate.hpp"
#include "cathode/pipeline/config.hpp"
#include "cathode/pipeline/dedup.hpp"
#include "cathode/pipeline/events.hpp"
#include "cathode/pipeline/ranking.hpp"

namespace cathode {

enum class SessionPhase { Exploration, ExplorationComplete, Deduplicated, Ranked };
std::string_view to_string(SessionPhase phase);

struct RoundState {
  std::size_t number = 1;  // 1-based within the task
  TemplateId template_id = TemplateId::InitialRoundInitialCycle;
  std::string prompt;
  nlohmann::json bindings;
  std::optional<std::string> override_id;
  std::optional<std::string> response;
  bool evaluated = false;
  std::vector<std::size_t> candidates;  // indices into SessionState::candidates
  std::vector<std::string> surplus;     // parsed but not needed
  std::vector<std::string> skipped;     // bullets without a formula
  std::optional<std::string> error;
};

// Rounds that optimize one parent formula until k valid candidates exist.
struct TaskState {
  std::size_t index = 0;
  std::size_t tree = 0;
  std::size_t cycle = 1;
  Formula parent;
  std::optional<std::size_t> parent_candidate;
  std::vector<RoundState> rounds;
  std::size_t valid = 0;
  bool budget_exhausted = false;
};

struct PromptOverride {
  std::string id;
  std::string body;
};

// Everything the event log implies. Built only through apply().
struct SessionState {
  std::string id;
  SessionConfig config;
  Formula seed;
  SessionPhase phase = SessionPhase::Exploration;
  std::vector<TaskState> tasks;
  std::vector<CandidateRecord> candidates;
  std::vector<std::size_t> exploration_output;
  bool exploration_complete_run = false;  // every task filled its k slots
  std::optional<DedupResult> dedup;        // indices are candidate indices
  std::vector<RankExclusion> rank_exclusions;
  std::optional<RankOutcome> rank;  // indices are candidate indices
  std::optional<nlohmann::json> rank_failure;
  std::map<TemplateId, PromptOverride> pending_overrides;
  std::size_t overrides_set = 0;
  std::size_t llm_exchanges = 0;
  std::size_t operator_verdicts = 0;
  std::uint64_t last_seq = 0;

  // Throws UnrecoverableLog when the event does not fit the state.
  void apply(const Event& event);
  static SessionState replay(std::span<const Event> events);

  bool task_complete(const TaskState& task) const { return task.valid >= config.k; }
  // Open task that still needs rounds, if any.
  const TaskState* active_task() const;
  std::vector<CandidateRecord> output_candidates() const;
  // Funnel counters: generated, valid, unique, charge_ranked, complexity_filtered, top.
  nlohmann::json funnel() const;
  nlohmann::json summary() const;
  nlohmann::json to_json() const;
};

nlohmann::json to_json(const PromptBindings& bindings);

// Event-sourced session. All mutations go through commit(): the event is
// written to the sink first, then applied. One writer at a time (callers
// serialize commands); snapshot(), events_after() and wait_for_events() are
// safe from any thread.
class Session {
 public:
  Session(std::string id, Clock clock, std::shared_ptr<EventSink> sink = nullptr);

  // Rebuilds a session from its log; nothing is written.
  static std::unique_ptr<Session> replay(std::string id, std::vector<Event> events, Clock clock,
                                         std::shared_ptr<EventSink> sink = nullptr);

  const Event& commit(const std::string& type, nlohmann::json payload);

  // Writer-side view; not synchronized.
  const SessionState& state() const noexcept { return state_; }
  SessionState snapshot() const;
  const std::string& id() const noexcept { return id_; }

  std::vector<Event> events_after(std::uint64_t after) const;
  std::uint64_t event_count() const;
  // Blocks until an event with seq > after exists or the timeout passes.
  std::vector<Event> wait_for_events(std::uint64_t after, std::chrono::milliseconds timeout) const;

  ComparatorCache& cache() noexcept { return cache_; }

 private:
  void absorb(const Event& event, SessionState next);

  std::string id_;
  Clock clock_;
  std::shared_ptr<EventSink> sink_;
  mutable std::shared_mutex mutex_;
  mutable std::condition_variable_any changed_;
  SessionState state_;
  std::vector<Event> events_;
  ComparatorCache cache_;
};

// Validates config and seed (InvalidSeed when the seed has no lithium) and
// commits session_created.
std::unique_ptr<Session> start_session(std::string id, const SessionConfig& config, const Formula& seed,
                                       Clock clock = logical_clock(), std::shared_ptr<EventSink> sink = nullptr);

// Forwards to inner and commits an llm_exchange event per call.
class LoggedBackend final : public LlmBackend {
 public:
  LoggedBackend(Session& session, LlmBackend& inner, std::string purpose)
      : session_(session), inner_(inner), purpose_(std::move(purpose)) {}
  std::string send(const ChatRequest& request) override;

 private:
  Session& session_;
  LlmBackend& inner_;
  std::string purpose_;
};

// Sets a one-shot body for the next round that uses template id and commits
// prompt_override_set. Returns the override id. Throws TemplateSyntax or
// MissingBinding.
std::string set_prompt_override(Session& session, TemplateId id, std::string body);

// Flags (or unflags) a candidate; flagged candidates are left out of later
// prompt lists. Throws NotFound.
void flag_candidate(Session& session, std::size_t index, bool flagged, const std::string& note);

}  // namespace cathode
