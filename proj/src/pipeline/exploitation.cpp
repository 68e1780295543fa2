#include "cathode/pipeline/exploitation.hpp"

#include "cathode/error.hpp"

namespace cathode {
namespace {

// Maps positions in the ranked list back to candidate indices.
void remap(std::vector<RankEntry>& entries, const std::vector<std::size_t>& ids) {
  for (auto& e : entries) e.index = ids.at(e.index);
}

RankOutcome remapped(RankOutcome o, const std::vector<std::size_t>& ids) {
  remap(o.charge_ranked, ids);
  remap(o.complexity_excluded, ids);
  remap(o.complexity_filtered, ids);
  remap(o.voltage_sorted, ids);
  remap(o.voltage_ordered, ids);
  for (auto& x : o.excluded) x.index = ids.at(x.index);
  return o;
}

}  // namespace

DedupResult run_dedup(Session& session) {
  const auto& state = session.state();
  if (state.phase != SessionPhase::ExplorationComplete) {
    throw Error(ErrorKind::InvalidPhase, std::string("dedup needs a closed exploration, phase is ") +
                                             std::string(to_string(state.phase)));
  }
  const auto ids = state.exploration_output;
  std::vector<Formula> formulas;
  for (auto i : ids) formulas.push_back(state.candidates[i].formula);
  DedupResult local = dedup_candidates(formulas, state.config.tau);

  DedupResult result;
  auto removed = nlohmann::json::array();
  for (auto u : local.unique) result.unique.push_back(ids[u]);
  for (const auto& r : local.removed) {
    result.removed.push_back({ids[r.index], ids[r.duplicate_of]});
    removed.push_back({{"index", ids[r.index]}, {"duplicate_of", ids[r.duplicate_of]}});
  }
  session.commit(event_type::kDedupCompleted, {{"unique", result.unique}, {"removed", removed}});
  return result;
}

void record_operator_verdicts(Session& session, const std::vector<OperatorVerdict>& verdicts) {
  for (const auto& v : verdicts) {
    if (!(v.winner == v.first) && !(v.winner == v.second)) {
      throw Error(ErrorKind::InvalidArgument,
                  "winner " + v.winner.render() + " is not one of " + v.first.render() + ", " + v.second.render());
    }
  }
  for (const auto& v : verdicts) {
    session.commit(event_type::kOperatorVerdict, to_json(ComparisonRecord{v.first, v.second, v.winner, v.note,
                                                                          "operator"}));
  }
}

RankOutcome run_rank(Session& session, LlmBackend& backend, const ValenceTable& valences) {
  const auto& state = session.state();
  if (state.phase != SessionPhase::Deduplicated && state.phase != SessionPhase::Ranked) {
    throw Error(ErrorKind::InvalidPhase, "rank needs deduplicated candidates");
  }
  const std::vector<std::size_t> ids = state.dedup->unique;
  std::vector<Formula> formulas;
  for (auto i : ids) formulas.push_back(state.candidates[i].formula);
  const SessionConfig config = state.config;

  LoggedBackend logged(session, backend, "comparison");
  RankHooks hooks;
  hooks.on_excluded = [&](const RankExclusion& x) {
    session.commit(event_type::kCandidateExcluded,
                   {{"index", ids.at(x.index)}, {"formula", x.formula.render()}, {"reason", x.reason}});
  };
  hooks.on_verdict = [&](const ComparisonRecord& r) { session.commit(event_type::kComparisonVerdict, to_json(r)); };

  try {
    RankOutcome outcome = remapped(rank_candidates(formulas, logged, session.cache(), valences, config, hooks), ids);
    session.commit(event_type::kRankCompleted, {{"outcome", to_json(outcome)}});
    return outcome;
  } catch (const RankingInterrupted& interrupted) {
    RankOutcome partial = remapped(interrupted.partial(), ids);
    session.commit(event_type::kRankFailed, {{"partial", to_json(partial)},
                                             {"first", interrupted.first().render()},
                                             {"second", interrupted.second().render()},
                                             {"last_response", interrupted.last_response()},
                                             {"error", interrupted.what()}});
    throw RankingInterrupted(interrupted, std::move(partial));
  }
}

}  // namespace cathode
