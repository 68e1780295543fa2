#include "cathode/pipeline/exploration.hpp"

#include <algorithm>
#include <set>

#include "cathode/error.hpp"
#include "cathode/knowledge/search.hpp"
#include "cathode/llm/response_parser.hpp"

namespace cathode {
namespace {

struct PromptChoice {
  TemplateId id;
  PromptBindings bindings;
};

PromptChoice choose_prompt(const SessionState& state, const TaskState& task) {
  const bool any_candidates = std::any_of(task.rounds.begin(), task.rounds.end(),
                                          [](const RoundState& r) { return !r.candidates.empty(); });
  if (!any_candidates) {
    if (task.cycle == 1) return {TemplateId::InitialRoundInitialCycle, initial_bindings(task.parent)};
    return {TemplateId::InitialRoundSubsequentCycle, subsequent_cycle_bindings(task.parent, state.seed)};
  }
  std::vector<Formula> existing;
  std::vector<InvalidEntry> invalid;
  std::set<std::string> seen;
  for (const auto& r : task.rounds) {
    for (auto idx : r.candidates) {
      const auto& c = state.candidates[idx];
      if (c.flagged) continue;
      if (c.status != CandidateStatus::Existing && c.status != CandidateStatus::InvalidCapacity) continue;
      if (!seen.insert(c.formula.canonical_key()).second) continue;
      if (c.status == CandidateStatus::Existing) existing.push_back(c.formula);
      else invalid.push_back({c.formula, c.retrieved_hint});
    }
  }
  return {TemplateId::SubsequentRound, subsequent_round_bindings(existing, invalid)};
}

std::vector<ChatMessage> history_of(const TaskState& task) {
  std::vector<ChatMessage> history;
  for (const auto& r : task.rounds) {
    if (!r.response) continue;
    history.push_back({"user", r.prompt});
    history.push_back({"assistant", *r.response});
  }
  return history;
}

[[noreturn]] void budget_exhausted(Session& session, TaskState task) {
  session.commit(event_type::kRoundBudgetExhausted, {{"task", task.index}, {"cycle", task.cycle},
                                                     {"tree", task.tree}, {"rounds", task.rounds.size()}});
  throw Error(ErrorKind::RoundBudgetExhausted,
              "cycle " + std::to_string(task.cycle) + " of tree " + std::to_string(task.tree + 1) + ": " +
                  std::to_string(task.valid) + " of " + std::to_string(session.state().config.k) +
                  " valid candidates for " + task.parent.render() + " after " + std::to_string(task.rounds.size()) +
                  " rounds");
}

std::vector<std::size_t> final_output(const SessionState& state) {
  std::vector<std::size_t> out;
  for (const auto& c : state.candidates) {
    if (c.cycle == state.config.cycles && c.status == CandidateStatus::Valid) out.push_back(c.index);
  }
  return out;
}

void close_exploration(Session& session) {
  const auto& s = session.state();
  const bool complete = std::all_of(s.tasks.begin(), s.tasks.end(),
                                    [&](const TaskState& t) { return s.task_complete(t); });
  session.commit(event_type::kExplorationCompleted,
                 {{"output", final_output(s)}, {"complete", complete}, {"expected", s.config.expected_candidates()}});
}

}  // namespace

std::optional<TaskSpec> next_task(const SessionState& state) {
  std::size_t pos = 0;
  for (std::size_t tree = 0; tree < state.config.trees; ++tree) {
    if (pos++ == state.tasks.size()) return TaskSpec{tree, 1, state.seed, std::nullopt};
    for (std::size_t cycle = 2; cycle <= state.config.cycles; ++cycle) {
      for (const auto& c : state.candidates) {
        if (c.tree != tree || c.cycle != cycle - 1 || c.status != CandidateStatus::Valid) continue;
        if (pos++ == state.tasks.size()) return TaskSpec{tree, cycle, c.formula, c.index};
      }
    }
  }
  return std::nullopt;
}

RoundReport run_round(Session& session, const ExplorationContext& ctx) {
  if (session.state().phase != SessionPhase::Exploration) {
    throw Error(ErrorKind::InvalidPhase, "session is past exploration");
  }
  RoundReport report;
  if (!session.state().active_task()) {
    auto spec = next_task(session.state());
    if (!spec) {
      close_exploration(session);
      report.exploration_complete = true;
      return report;
    }
    session.commit(event_type::kTaskOpened,
                   {{"task", session.state().tasks.size()},
                    {"tree", spec->tree},
                    {"cycle", spec->cycle},
                    {"parent", spec->parent.render()},
                    {"parent_candidate", spec->parent_candidate ? nlohmann::json(*spec->parent_candidate)
                                                                : nlohmann::json(nullptr)}});
  }

  const SessionState& state = session.state();
  const SessionConfig& cfg = state.config;
  const TaskState& task = *state.active_task();
  if (task.rounds.size() >= cfg.max_rounds_per_cycle) budget_exhausted(session, task);

  const std::size_t task_index = task.index;
  const std::size_t round_number = task.rounds.size() + 1;
  PromptChoice choice = choose_prompt(state, task);
  std::optional<std::string> override_id;
  std::string prompt;
  if (auto it = state.pending_overrides.find(choice.id); it != state.pending_overrides.end()) {
    prompt = validate_override(choice.id, it->second.body).render(choice.bindings);
    override_id = it->second.id;
  } else {
    prompt = render_prompt(choice.id, choice.bindings);
  }

  ChatRequest request;
  request.template_id = choice.id;
  request.bindings = choice.bindings;
  request.prompt = prompt;
  request.history = history_of(task);
  request.sampling = cfg.sampling;
  request.model_tag = cfg.generation_model;

  session.commit(event_type::kRoundStarted,
                 {{"task", task_index},
                  {"round", round_number},
                  {"template", to_string(choice.id)},
                  {"prompt", prompt},
                  {"bindings", to_json(choice.bindings)},
                  {"override_id", override_id ? nlohmann::json(*override_id) : nlohmann::json(nullptr)}});

  report.ran = true;
  report.task = task_index;
  report.round = round_number;
  report.template_id = choice.id;
  report.override_id = override_id;

  LoggedBackend logged(session, ctx.backend, "generation");
  const std::string response = logged.send(request);

  // References into the state may dangle after a commit.
  const TaskState& current = session.state().tasks[task_index];
  report.tree = current.tree;
  report.cycle = current.cycle;

  BulletParse parsed;
  std::optional<std::string> parse_error;
  try {
    parsed = parse_candidate_bullets(response);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoCandidatesFound) throw;
    parse_error = e.what();
  }

  const std::size_t needed = cfg.k - current.valid;
  const Formula parent = current.parent;
  auto candidates = nlohmann::json::array();
  std::vector<std::string> surplus;
  std::size_t next_index = session.state().candidates.size();
  for (const auto& bullet : parsed.candidates) {
    if (report.valid_added >= needed) {
      surplus.push_back(bullet.formula.render());
      continue;
    }
    CandidateRecord rec;
    rec.index = next_index++;
    rec.formula = bullet.formula;
    rec.parent = parent;
    rec.parent_candidate = current.parent_candidate;
    rec.task = task_index;
    rec.tree = current.tree;
    rec.cycle = current.cycle;
    rec.round = round_number;
    rec.reasoning = bullet.reasoning;
    rec.capacity = theoretical_capacity(bullet.formula);
    if (ctx.registry.exists(bullet.formula)) {
      rec.status = CandidateStatus::Existing;
      rec.existing_source = "registry";
    } else if (auto match = exists_range(bullet.formula, ctx.snapshot, cfg.tau)) {
      rec.status = CandidateStatus::Existing;
      rec.existing_source = match->source_id.empty() ? match->formula.render() : match->source_id;
    } else if (!decide(parent, bullet.formula)) {
      rec.status = CandidateStatus::InvalidCapacity;
      if (auto hint = retrieve_similar(bullet.formula, parent, ctx.snapshot, ctx.weights)) {
        rec.retrieved_hint = hint->formula;
      }
    } else {
      rec.status = CandidateStatus::Valid;
      ++report.valid_added;
    }
    report.candidates.push_back(rec.index);
    candidates.push_back(to_json(rec));
  }

  session.commit(event_type::kRoundEvaluated,
                 {{"task", task_index},
                  {"round", round_number},
                  {"candidates", candidates},
                  {"surplus", surplus},
                  {"skipped", parsed.skipped},
                  {"error", parse_error ? nlohmann::json(*parse_error) : nlohmann::json(nullptr)}});

  const TaskState& after = session.state().tasks[task_index];
  report.task_complete = session.state().task_complete(after);
  if (!report.task_complete && after.rounds.size() >= cfg.max_rounds_per_cycle) budget_exhausted(session, after);
  if (parse_error) throw Error(ErrorKind::NoCandidatesFound, *parse_error);

  if (report.task_complete && !next_task(session.state())) {
    close_exploration(session);
    report.exploration_complete = true;
  }
  return report;
}

std::vector<CandidateRecord> run_exploration(Session& session, const ExplorationContext& ctx) {
  while (session.state().phase == SessionPhase::Exploration) {
    try {
      run_round(session, ctx);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoCandidatesFound) throw;
    }
  }
  return session.state().output_candidates();
}

}  // namespace cathode
