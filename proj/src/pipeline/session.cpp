#include "cathode/pipeline/session.hpp"

#include <algorithm>
#include <mutex>

#include "cathode/error.hpp"
#include "cathode/metrics/metrics.hpp"

namespace cathode {
namespace {

[[noreturn]] void inconsistent(const Event& e, const std::string& why) {
  throw Error(ErrorKind::UnrecoverableLog, "event " + std::to_string(e.seq) + " (" + e.type + "): " + why);
}

std::optional<std::size_t> optional_index(const nlohmann::json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  return it->get<std::size_t>();
}

nlohmann::json indices_json(const std::vector<std::size_t>& v) { return nlohmann::json(v); }

RoundState* last_open_round(std::vector<TaskState>& tasks) {
  if (tasks.empty() || tasks.back().rounds.empty()) return nullptr;
  auto& round = tasks.back().rounds.back();
  return round.evaluated ? nullptr : &round;
}

}  // namespace

std::string_view to_string(SessionPhase phase) {
  switch (phase) {
    case SessionPhase::Exploration: return "exploration";
    case SessionPhase::ExplorationComplete: return "exploration_complete";
    case SessionPhase::Deduplicated: return "deduplicated";
    case SessionPhase::Ranked: return "ranked";
  }
  return "unknown";
}

nlohmann::json to_json(const PromptBindings& bindings) {
  nlohmann::json lists = nlohmann::json::object();
  for (const auto& [name, items] : bindings.lists) lists[name] = items;
  return {{"values", bindings.values}, {"lists", lists}};
}

void SessionState::apply(const Event& e) {
  if (e.seq != last_seq + 1) inconsistent(e, "expected seq " + std::to_string(last_seq + 1));
  if (last_seq == 0 && e.type != event_type::kSessionCreated) inconsistent(e, "log must start with session_created");
  const auto& p = e.payload;
  try {
    if (e.type == event_type::kSessionCreated) {
      if (last_seq != 0) inconsistent(e, "duplicate session_created");
      id = p.at("session_id").get<std::string>();
      config = session_config_from_json(p.at("config"));
      seed = Formula::parse(p.at("seed").get<std::string>());
      phase = SessionPhase::Exploration;
    } else if (e.type == event_type::kTaskOpened) {
      TaskState t;
      t.index = p.at("task").get<std::size_t>();
      if (t.index != tasks.size()) inconsistent(e, "task index out of order");
      t.tree = p.at("tree").get<std::size_t>();
      t.cycle = p.at("cycle").get<std::size_t>();
      t.parent = Formula::parse(p.at("parent").get<std::string>());
      t.parent_candidate = optional_index(p, "parent_candidate");
      tasks.push_back(std::move(t));
    } else if (e.type == event_type::kPromptOverrideSet) {
      const auto id = template_id_from_string(p.at("template").get<std::string>());
      pending_overrides[id] = PromptOverride{p.at("override_id").get<std::string>(), p.at("body").get<std::string>()};
      ++overrides_set;
    } else if (e.type == event_type::kRoundStarted) {
      const auto task = p.at("task").get<std::size_t>();
      if (task >= tasks.size()) inconsistent(e, "unknown task");
      RoundState r;
      r.number = p.at("round").get<std::size_t>();
      r.template_id = template_id_from_string(p.at("template").get<std::string>());
      r.prompt = p.at("prompt").get<std::string>();
      r.bindings = p.at("bindings");
      if (auto oid = p.find("override_id"); oid != p.end() && !oid->is_null()) {
        r.override_id = oid->get<std::string>();
        auto it = pending_overrides.find(r.template_id);
        if (it != pending_overrides.end() && it->second.id == *r.override_id) pending_overrides.erase(it);
      }
      tasks[task].rounds.push_back(std::move(r));
    } else if (e.type == event_type::kLlmExchange) {
      ++llm_exchanges;
      if (p.value("purpose", "") == "generation") {
        if (auto* round = last_open_round(tasks)) round->response = p.at("response").get<std::string>();
      }
    } else if (e.type == event_type::kRoundEvaluated) {
      const auto task_index = p.at("task").get<std::size_t>();
      if (task_index >= tasks.size()) inconsistent(e, "unknown task");
      auto& task = tasks[task_index];
      if (task.rounds.empty()) inconsistent(e, "no round started");
      auto& round = task.rounds.back();
      round.evaluated = true;
      for (const auto& c : p.at("candidates")) {
        CandidateRecord rec = candidate_from_json(c);
        if (rec.index != candidates.size()) inconsistent(e, "candidate index out of order");
        if (rec.status == CandidateStatus::Valid) ++task.valid;
        round.candidates.push_back(rec.index);
        candidates.push_back(std::move(rec));
      }
      round.surplus = p.value("surplus", std::vector<std::string>{});
      round.skipped = p.value("skipped", std::vector<std::string>{});
      if (auto err = p.find("error"); err != p.end() && !err->is_null()) round.error = err->get<std::string>();
    } else if (e.type == event_type::kRoundBudgetExhausted) {
      const auto task = p.at("task").get<std::size_t>();
      if (task >= tasks.size()) inconsistent(e, "unknown task");
      tasks[task].budget_exhausted = true;
    } else if (e.type == event_type::kExplorationCompleted) {
      if (phase != SessionPhase::Exploration) inconsistent(e, "exploration already completed");
      exploration_output = p.at("output").get<std::vector<std::size_t>>();
      exploration_complete_run = p.at("complete").get<bool>();
      phase = SessionPhase::ExplorationComplete;
    } else if (e.type == event_type::kDedupCompleted) {
      if (phase != SessionPhase::ExplorationComplete) inconsistent(e, "dedup outside its phase");
      DedupResult d;
      d.unique = p.at("unique").get<std::vector<std::size_t>>();
      for (const auto& r : p.at("removed")) {
        const auto idx = r.at("index").get<std::size_t>();
        if (idx >= candidates.size()) inconsistent(e, "unknown candidate");
        d.removed.push_back({idx, r.at("duplicate_of").get<std::size_t>()});
        candidates[idx].status = CandidateStatus::Duplicate;
      }
      dedup = std::move(d);
      phase = SessionPhase::Deduplicated;
    } else if (e.type == event_type::kCandidateExcluded) {
      const auto idx = p.at("index").get<std::size_t>();
      const bool known = std::any_of(rank_exclusions.begin(), rank_exclusions.end(),
                                     [&](const RankExclusion& x) { return x.index == idx; });
      if (!known) {
        rank_exclusions.push_back(
            {idx, Formula::parse(p.at("formula").get<std::string>()), p.at("reason").get<std::string>()});
      }
    } else if (e.type == event_type::kComparisonVerdict || e.type == event_type::kOperatorVerdict) {
      comparison_from_json(p);  // validates
      if (e.type == event_type::kOperatorVerdict) ++operator_verdicts;
    } else if (e.type == event_type::kRankCompleted) {
      if (phase != SessionPhase::Deduplicated && phase != SessionPhase::Ranked) inconsistent(e, "rank before dedup");
      RankOutcome outcome = rank_outcome_from_json(p.at("outcome"));
      for (auto& c : candidates) {
        if (c.status == CandidateStatus::Selected) c.status = CandidateStatus::Valid;
      }
      for (const auto& entry : outcome.voltage_ordered) {
        if (entry.index >= candidates.size()) inconsistent(e, "unknown candidate");
        candidates[entry.index].status = CandidateStatus::Selected;
      }
      rank = std::move(outcome);
      rank_failure.reset();
      phase = SessionPhase::Ranked;
    } else if (e.type == event_type::kRankFailed) {
      rank_failure = p;
    } else if (e.type == event_type::kCandidateFlagged) {
      const auto idx = p.at("index").get<std::size_t>();
      if (idx >= candidates.size()) inconsistent(e, "unknown candidate");
      candidates[idx].flagged = p.at("flagged").get<bool>();
      candidates[idx].flag_note = p.value("note", "");
    } else {
      inconsistent(e, "unknown event type");
    }
  } catch (const nlohmann::json::exception& ex) {
    inconsistent(e, ex.what());
  } catch (const Error& ex) {
    if (ex.kind() == ErrorKind::UnrecoverableLog) throw;
    inconsistent(e, ex.what());
  }
  last_seq = e.seq;
}

SessionState SessionState::replay(std::span<const Event> events) {
  SessionState s;
  for (const auto& e : events) s.apply(e);
  return s;
}

const TaskState* SessionState::active_task() const {
  if (tasks.empty()) return nullptr;
  const auto& t = tasks.back();
  if (task_complete(t) || t.budget_exhausted) return nullptr;
  return &t;
}

std::vector<CandidateRecord> SessionState::output_candidates() const {
  std::vector<CandidateRecord> out;
  for (auto i : exploration_output) out.push_back(candidates.at(i));
  return out;
}

nlohmann::json SessionState::funnel() const {
  const auto valid = std::count_if(candidates.begin(), candidates.end(), [](const CandidateRecord& c) {
    return c.status == CandidateStatus::Valid || c.status == CandidateStatus::Duplicate ||
           c.status == CandidateStatus::Selected;
  });
  return {{"generated", candidates.size()},
          {"valid", valid},
          {"output", exploration_output.size()},
          {"expected", config.expected_candidates()},
          {"unique", dedup ? nlohmann::json(dedup->unique.size()) : nlohmann::json(nullptr)},
          {"charge_ranked", rank ? nlohmann::json(rank->charge_ranked.size()) : nlohmann::json(nullptr)},
          {"complexity_filtered", rank ? nlohmann::json(rank->complexity_filtered.size()) : nlohmann::json(nullptr)},
          {"top", rank ? nlohmann::json(rank->voltage_ordered.size()) : nlohmann::json(nullptr)}};
}

nlohmann::json SessionState::summary() const {
  const TaskState* task = active_task();
  return {{"session_id", id},
          {"seed", seed.render()},
          {"phase", to_string(phase)},
          {"tasks", tasks.size()},
          {"current_task", task ? nlohmann::json(task->index) : nlohmann::json(nullptr)},
          {"current_cycle", task ? nlohmann::json(task->cycle) : nlohmann::json(nullptr)},
          {"current_round", task ? nlohmann::json(task->rounds.size() + 1) : nlohmann::json(nullptr)},
          {"event_count", last_seq},
          {"funnel", funnel()}};
}

nlohmann::json SessionState::to_json() const {
  nlohmann::json doc = summary();
  doc["config"] = cathode::to_json(config);
  auto tasks_json = nlohmann::json::array();
  for (const auto& t : tasks) {
    auto rounds = nlohmann::json::array();
    for (const auto& r : t.rounds) {
      rounds.push_back({{"round", r.number},
                        {"template", to_string(r.template_id)},
                        {"prompt", r.prompt},
                        {"bindings", r.bindings},
                        {"override_id", r.override_id ? nlohmann::json(*r.override_id) : nlohmann::json(nullptr)},
                        {"response", r.response ? nlohmann::json(*r.response) : nlohmann::json(nullptr)},
                        {"evaluated", r.evaluated},
                        {"candidates", indices_json(r.candidates)},
                        {"surplus", r.surplus},
                        {"skipped", r.skipped},
                        {"error", r.error ? nlohmann::json(*r.error) : nlohmann::json(nullptr)}});
    }
    tasks_json.push_back({{"task", t.index},
                          {"tree", t.tree},
                          {"cycle", t.cycle},
                          {"parent", t.parent.render()},
                          {"parent_candidate",
                           t.parent_candidate ? nlohmann::json(*t.parent_candidate) : nlohmann::json(nullptr)},
                          {"valid", t.valid},
                          {"complete", task_complete(t)},
                          {"budget_exhausted", t.budget_exhausted},
                          {"rounds", rounds}});
  }
  doc["task_list"] = tasks_json;
  auto cands = nlohmann::json::array();
  for (const auto& c : candidates) cands.push_back(cathode::to_json(c));
  doc["candidates"] = cands;
  doc["exploration_output"] = indices_json(exploration_output);
  doc["exploration_complete_run"] = exploration_complete_run;
  if (dedup) {
    auto removed = nlohmann::json::array();
    for (const auto& r : dedup->removed) removed.push_back({{"index", r.index}, {"duplicate_of", r.duplicate_of}});
    doc["dedup"] = {{"unique", indices_json(dedup->unique)}, {"removed", removed}};
  } else {
    doc["dedup"] = nullptr;
  }
  doc["rank"] = rank ? cathode::to_json(*rank) : nlohmann::json(nullptr);
  doc["rank_failure"] = rank_failure ? *rank_failure : nlohmann::json(nullptr);
  auto overrides = nlohmann::json::object();
  for (const auto& [tid, o] : pending_overrides) overrides[std::string(to_string(tid))] = {{"override_id", o.id}, {"body", o.body}};
  doc["pending_overrides"] = overrides;
  doc["llm_exchanges"] = llm_exchanges;
  return doc;
}

Session::Session(std::string id, Clock clock, std::shared_ptr<EventSink> sink)
    : id_(std::move(id)), clock_(std::move(clock)), sink_(std::move(sink)) {}

std::unique_ptr<Session> Session::replay(std::string id, std::vector<Event> events, Clock clock,
                                         std::shared_ptr<EventSink> sink) {
  auto session = std::make_unique<Session>(std::move(id), std::move(clock), std::move(sink));
  for (auto& e : events) {
    SessionState next = session->state_;
    next.apply(e);
    session->absorb(e, std::move(next));
  }
  return session;
}

void Session::absorb(const Event& event, SessionState next) {
  if (event.type == event_type::kComparisonVerdict || event.type == event_type::kOperatorVerdict) {
    cache_.store(comparison_from_json(event.payload));
  }
  std::unique_lock lock(mutex_);
  state_ = std::move(next);
  events_.push_back(event);
}

const Event& Session::commit(const std::string& type, nlohmann::json payload) {
  Event event;
  event.seq = state_.last_seq + 1;
  event.type = type;
  event.timestamp = clock_(event.seq);
  event.payload = std::move(payload);
  // Validate before anything reaches the log.
  SessionState next = state_;
  next.apply(event);
  if (sink_) sink_->append(event);
  absorb(event, std::move(next));
  changed_.notify_all();
  std::shared_lock lock(mutex_);
  return events_.back();
}

SessionState Session::snapshot() const {
  std::shared_lock lock(mutex_);
  return state_;
}

std::vector<Event> Session::events_after(std::uint64_t after) const {
  std::shared_lock lock(mutex_);
  if (after >= events_.size()) return {};
  return {events_.begin() + static_cast<std::ptrdiff_t>(after), events_.end()};
}

std::uint64_t Session::event_count() const {
  std::shared_lock lock(mutex_);
  return events_.size();
}

std::vector<Event> Session::wait_for_events(std::uint64_t after, std::chrono::milliseconds timeout) const {
  std::shared_lock lock(mutex_);
  changed_.wait_for(lock, timeout, [&] { return events_.size() > after; });
  if (after >= events_.size()) return {};
  return {events_.begin() + static_cast<std::ptrdiff_t>(after), events_.end()};
}

std::unique_ptr<Session> start_session(std::string id, const SessionConfig& config, const Formula& seed,
                                       Clock clock, std::shared_ptr<EventSink> sink) {
  config.validate();
  if (seed.species_count() == 0 || seed.coefficient("Li") <= 0.0) {
    throw Error(ErrorKind::InvalidSeed, "seed " + seed.render() + " contains no lithium");
  }
  auto session = std::make_unique<Session>(id, std::move(clock), std::move(sink));
  session->commit(event_type::kSessionCreated,
                  {{"session_id", id}, {"seed", seed.render()}, {"config", to_json(config)}});
  return session;
}

std::string LoggedBackend::send(const ChatRequest& request) {
  std::string response = inner_.send(request);
  session_.commit(event_type::kLlmExchange, {{"purpose", purpose_},
                                             {"template", to_string(request.template_id)},
                                             {"model", request.model_tag},
                                             {"prompt", request.prompt},
                                             {"response", response}});
  return response;
}

std::string set_prompt_override(Session& session, TemplateId id, std::string body) {
  validate_override(id, body);
  const std::string override_id = "ovr-" + std::to_string(session.state().overrides_set + 1);
  session.commit(event_type::kPromptOverrideSet,
                 {{"override_id", override_id}, {"template", to_string(id)}, {"body", std::move(body)}});
  return override_id;
}

void flag_candidate(Session& session, std::size_t index, bool flagged, const std::string& note) {
  if (index >= session.state().candidates.size()) {
    throw Error(ErrorKind::NotFound, "candidate " + std::to_string(index));
  }
  session.commit(event_type::kCandidateFlagged, {{"index", index}, {"flagged", flagged}, {"note", note}});
}

}  // namespace cathode
