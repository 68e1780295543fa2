#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cathode/llm/comparator.hpp"
#include "cathode/metrics/metrics.hpp"
#include "cathode/pipeline/config.hpp"

namespace cathode {

struct RankEntry {
  std::size_t index = 0;  // position in the ranked input (candidate index at session level)
  Formula formula;
  double charge = 0.0;
  double capacity = 0.0;
  std::size_t complexity = 0;
};

struct RankExclusion {
  std::size_t index = 0;
  Formula formula;
  std::string reason;
};

struct RankOutcome {
  std::vector<RankEntry> charge_ranked;        // stage A
  std::vector<RankEntry> complexity_excluded;  // stage A entries above complexity_max
  std::vector<RankEntry> complexity_filtered;  // stage B
  std::vector<RankEntry> voltage_sorted;       // stage C, full order
  std::vector<RankEntry> voltage_ordered;      // stage C, top voltage_top_m
  std::vector<RankExclusion> excluded;         // no computable charge
  std::vector<ComparisonRecord> comparison_log;  // one entry per oracle call, in call order
  bool complete = false;
};

nlohmann::json to_json(const ComparisonRecord& record);
ComparisonRecord comparison_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RankEntry& entry);
nlohmann::json to_json(const RankOutcome& outcome);
RankOutcome rank_outcome_from_json(const nlohmann::json& doc);

// Stage C was cut short by a comparator failure; partial() keeps stages A
// and B plus the comparisons made so far.
class RankingInterrupted : public ComparatorFailure {
 public:
  RankingInterrupted(const ComparatorFailure& cause, RankOutcome partial)
      : ComparatorFailure(cause), partial_(std::move(partial)) {}
  const RankOutcome& partial() const noexcept { return partial_; }

 private:
  RankOutcome partial_;
};

struct RankHooks {
  std::function<void(const RankExclusion&)> on_excluded;
  std::function<void(const ComparisonRecord&)> on_verdict;  // fresh backend verdicts only
};

// Stage A: ascending |total charge| (compared at 1e-9 resolution), ties by
// capacity descending, then rendering; first charge_top_n kept. Stage B:
// entries with complexity <= complexity_max, stably ordered by complexity,
// first complexity_top_n kept. Stage C: merge sort by compare_voltage,
// highest voltage first, first voltage_top_m kept.
RankOutcome rank_candidates(std::span<const Formula> unique, LlmBackend& backend, ComparatorCache& cache,
                            const ValenceTable& valences, const SessionConfig& config,
                            const RankHooks& hooks = {});

// Stages A and B only; no backend involved.
RankOutcome rank_without_voltage(std::span<const Formula> unique, const ValenceTable& valences,
                                 const SessionConfig& config, const RankHooks& hooks = {});

}  // namespace cathode
