#pragma once

#include <optional>
#include <vector>

#include "cathode/knowledge/registry.hpp"
#include "cathode/knowledge/snapshot.hpp"
#include "cathode/pipeline/session.hpp"

namespace cathode {

struct ExplorationContext {
  LlmBackend& backend;
  const Snapshot& snapshot;
  ExternalRegistryClient& registry;
  const GroupWeights& weights = GroupWeights::standard();
};

struct TaskSpec {
  std::size_t tree = 0;
  std::size_t cycle = 1;
  Formula parent;
  std::optional<std::size_t> parent_candidate;
};

// Next task of the plan: per tree, one cycle-1 task on the seed, then one
// task per valid output of the tree's previous cycle, in candidate order.
std::optional<TaskSpec> next_task(const SessionState& state);

struct RoundReport {
  bool ran = false;  // false when the call only closed the exploration
  std::size_t task = 0;
  std::size_t tree = 0;
  std::size_t cycle = 0;
  std::size_t round = 0;
  TemplateId template_id = TemplateId::InitialRoundInitialCycle;
  std::optional<std::string> override_id;
  std::vector<std::size_t> candidates;
  std::size_t valid_added = 0;
  bool task_complete = false;
  bool exploration_complete = false;
};

// One generation round for the active (or next) task. Registry or snapshot
// matches are marked existing; candidates not beating the parent's capacity
// are marked invalid with a retrieval hint. Throws
// InvalidPhase, NoCandidatesFound (round recorded) and RoundBudgetExhausted
// (recorded; the next call moves on to the following task).
RoundReport run_round(Session& session, const ExplorationContext& ctx);

// Runs rounds until the exploration is closed and returns its output: the
// valid candidates of the final cycle. Unparsable responses only cost a
// round; RoundBudgetExhausted propagates.
std::vector<CandidateRecord> run_exploration(Session& session, const ExplorationContext& ctx);

}  // namespace cathode
