#include "cathode/pipeline/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "cathode/pipeline/merge_sort.hpp"

namespace cathode {
namespace {

nlohmann::json entries_json(const std::vector<RankEntry>& entries) {
  auto out = nlohmann::json::array();
  for (const auto& e : entries) out.push_back(to_json(e));
  return out;
}

RankEntry entry_from_json(const nlohmann::json& doc) {
  return RankEntry{doc.at("index").get<std::size_t>(), Formula::parse(doc.at("formula").get<std::string>()),
                   doc.at("charge").get<double>(), doc.at("capacity").get<double>(),
                   doc.at("complexity").get<std::size_t>()};
}

std::vector<RankEntry> entries_from_json(const nlohmann::json& doc) {
  std::vector<RankEntry> out;
  for (const auto& e : doc) out.push_back(entry_from_json(e));
  return out;
}

long long charge_bucket(double charge) { return std::llround(std::abs(charge) * 1e9); }

}  // namespace

nlohmann::json to_json(const ComparisonRecord& r) {
  return {{"first", r.first.render()},   {"second", r.second.render()}, {"winner", r.winner.render()},
          {"response", r.response},      {"source", r.source}};
}

ComparisonRecord comparison_from_json(const nlohmann::json& doc) {
  return ComparisonRecord{Formula::parse(doc.at("first").get<std::string>()),
                          Formula::parse(doc.at("second").get<std::string>()),
                          Formula::parse(doc.at("winner").get<std::string>()), doc.value("response", ""),
                          doc.value("source", "llm")};
}

nlohmann::json to_json(const RankEntry& e) {
  return {{"index", e.index},
          {"formula", e.formula.render()},
          {"charge", e.charge},
          {"capacity", e.capacity},
          {"complexity", e.complexity}};
}

nlohmann::json to_json(const RankOutcome& o) {
  auto excluded = nlohmann::json::array();
  for (const auto& x : o.excluded) {
    excluded.push_back({{"index", x.index}, {"formula", x.formula.render()}, {"reason", x.reason}});
  }
  auto log = nlohmann::json::array();
  for (const auto& r : o.comparison_log) log.push_back(to_json(r));
  return {{"charge_ranked", entries_json(o.charge_ranked)},
          {"complexity_excluded", entries_json(o.complexity_excluded)},
          {"complexity_filtered", entries_json(o.complexity_filtered)},
          {"voltage_sorted", entries_json(o.voltage_sorted)},
          {"voltage_ordered", entries_json(o.voltage_ordered)},
          {"excluded", excluded},
          {"comparison_log", log},
          {"complete", o.complete}};
}

RankOutcome rank_outcome_from_json(const nlohmann::json& doc) {
  RankOutcome o;
  o.charge_ranked = entries_from_json(doc.at("charge_ranked"));
  o.complexity_excluded = entries_from_json(doc.at("complexity_excluded"));
  o.complexity_filtered = entries_from_json(doc.at("complexity_filtered"));
  o.voltage_sorted = entries_from_json(doc.at("voltage_sorted"));
  o.voltage_ordered = entries_from_json(doc.at("voltage_ordered"));
  for (const auto& x : doc.at("excluded")) {
    o.excluded.push_back({x.at("index").get<std::size_t>(), Formula::parse(x.at("formula").get<std::string>()),
                          x.at("reason").get<std::string>()});
  }
  for (const auto& r : doc.at("comparison_log")) o.comparison_log.push_back(comparison_from_json(r));
  o.complete = doc.at("complete").get<bool>();
  return o;
}

RankOutcome rank_without_voltage(std::span<const Formula> unique, const ValenceTable& valences,
                                 const SessionConfig& config, const RankHooks& hooks) {
  RankOutcome out;
  std::vector<RankEntry> all;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    const Formula& f = unique[i];
    try {
      const double charge = total_charge(f, valences);
      all.push_back({i, f, charge, theoretical_capacity(f), preparation_complexity(f)});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UnknownValence) throw;
      RankExclusion x{i, f, e.what()};
      if (hooks.on_excluded) hooks.on_excluded(x);
      out.excluded.push_back(std::move(x));
    }
  }

  std::stable_sort(all.begin(), all.end(), [](const RankEntry& a, const RankEntry& b) {
    const auto ka = charge_bucket(a.charge);
    const auto kb = charge_bucket(b.charge);
    if (ka != kb) return ka < kb;
    if (a.capacity != b.capacity) return a.capacity > b.capacity;
    return a.formula.render() < b.formula.render();
  });
  if (all.size() > config.charge_top_n) all.resize(config.charge_top_n);
  out.charge_ranked = all;

  std::vector<RankEntry> kept;
  for (const auto& e : out.charge_ranked) {
    if (e.complexity <= config.complexity_max) kept.push_back(e);
    else out.complexity_excluded.push_back(e);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const RankEntry& a, const RankEntry& b) { return a.complexity < b.complexity; });
  if (kept.size() > config.complexity_top_n) kept.resize(config.complexity_top_n);
  out.complexity_filtered = std::move(kept);
  return out;
}

RankOutcome rank_candidates(std::span<const Formula> unique, LlmBackend& backend, ComparatorCache& cache,
                            const ValenceTable& valences, const SessionConfig& config, const RankHooks& hooks) {
  RankOutcome out = rank_without_voltage(unique, valences, config, hooks);
  const CompareOptions options{config.sampling, config.ranking_model};
  try {
    out.voltage_sorted =
        merge_sort_by_comparator(out.complexity_filtered, [&](const RankEntry& a, const RankEntry& b) {
          const bool first = compare_voltage(a.formula, b.formula, backend, cache, options, hooks.on_verdict) ==
                             Ordering::FirstWins;
          auto record = cache.find(a.formula, b.formula);
          out.comparison_log.push_back(ComparisonRecord{a.formula, b.formula, first ? a.formula : b.formula,
                                                        record ? record->response : std::string(),
                                                        record ? record->source : std::string("llm")});
          return first;
        });
  } catch (const ComparatorFailure& failure) {
    throw RankingInterrupted(failure, out);
  }
  out.voltage_ordered.assign(out.voltage_sorted.begin(),
                             out.voltage_sorted.begin() +
                                 static_cast<std::ptrdiff_t>(std::min(config.voltage_top_m, out.voltage_sorted.size())));
  out.complete = true;
  return out;
}

}  // namespace cathode
