// One PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "cathode/error.hpp"
#include "cathode/knowledge/registry.hpp"
#include "cathode/pipeline/dedup.hpp"
#include "cathode/pipeline/exploitation.hpp"
#include "cathode/pipeline/exploration.hpp"
#include "cathode/pipeline/merge_sort.hpp"
#include "cathode/pipeline/ranking.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace cathode;
namespace t = cathode::testing;

namespace {

// Tolerances and time budgets.
constexpr double kCapacityTolerance = 0.5;   // mAh/g
constexpr double kChargeTolerance = 1e-6;    // e
constexpr double kSeedChargeTolerance = 1e-12;
constexpr double kTau = 0.1;
constexpr double kBudgetFast = 1.0;          // s
constexpr double kBudgetFunnel = 2.0;
constexpr double kBudgetExploration = 5.0;
constexpr double kBudgetProperties = 30.0;
constexpr double kBudgetDeterminism = 30.0;

const char* const kSeedText = "LiNi0.8Mn0.1Co0.1O2";
const char* const kSiMg = "LiNi0.7Mn0.05Co0.05Si0.1Mg0.1O2";
const char* const kMgB = "LiNi0.65Mn0.1Co0.1Mg0.1B0.05O2";
const char* const kSiCa = "LiNi0.65Mn0.1Co0.1Si0.1Ca0.05O2";

int failures = 0;

// Runs check, which returns an empty string on success or the reason.
void criterion(const char* name, double budget_s, const std::function<std::string()>& check) {
  const auto start = std::chrono::steady_clock::now();
  std::string reason;
  try {
    reason = check();
  } catch (const std::exception& e) {
    reason = std::string("exception: ") + e.what();
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (reason.empty() && elapsed > budget_s) reason = "took longer than " + std::to_string(budget_s) + " s";
  const bool ok = reason.empty();
  if (!ok) ++failures;
  std::printf("%s  %-32s %9.3f s%s%s\n", ok ? "PASS" : "FAIL", name, elapsed, ok ? "" : "  ", reason.c_str());
}

std::set<std::string> keys(const std::vector<Formula>& fs) {
  std::set<std::string> out;
  for (const auto& f : fs) out.insert(f.canonical_key());
  return out;
}

std::set<std::string> keys(const std::vector<RankEntry>& entries) {
  std::set<std::string> out;
  for (const auto& e : entries) out.insert(e.formula.canonical_key());
  return out;
}

std::string capacities() {
  const std::pair<const char*, double> golden[] = {
      {kSeedText, 275.50}, {kSiMg, 294.66}, {kSiCa, 287.29}, {kMgB, 293.08}};
  for (const auto& [text, want] : golden) {
    const double got = theoretical_capacity(Formula::parse(text));
    if (std::abs(got - want) > kCapacityTolerance) {
      return std::string(text) + " capacity " + std::to_string(got) + ", expected " + std::to_string(want);
    }
  }
  return {};
}

std::string charges() {
  const auto rows = t::data_lines("nmc811_charge_top29.csv");
  if (rows.size() != 29) return "expected 29 rows, got " + std::to_string(rows.size());
  for (const auto& row : rows) {
    const double got = total_charge(Formula::parse(t::column(row, 0)));
    const double want = std::stod(t::column(row, 1));
    if (std::abs(got - want) > kChargeTolerance) return row + " gives " + std::to_string(got);
  }
  const double seed = total_charge(Formula::parse(kSeedText));
  if (std::abs(seed) >= kSeedChargeTolerance) return "seed charge " + std::to_string(seed);
  return {};
}

std::string dedup_golden() {
  const auto run = t::nmc811_run();
  if (run.size() != 100) return "expected 100 inputs";
  const auto r = dedup_candidates(run, kTau);
  std::vector<Formula> removed;
  for (const auto& rm : r.removed) removed.push_back(run[rm.index]);
  if (r.unique.size() != 89) return "kept " + std::to_string(r.unique.size());
  // The reference list names compositions; its element order need not be
  // the spelling of the occurrence that the scan drops.
  const auto want = t::data_formulas("nmc811_duplicates.txt");
  if (removed.size() != want.size()) return "removed " + std::to_string(removed.size());
  std::multiset<std::string> got_keys;
  std::multiset<std::string> want_keys;
  for (const auto& f : removed) got_keys.insert(f.canonical_key());
  for (const auto& f : want) want_keys.insert(f.canonical_key());
  if (got_keys != want_keys) {
    std::string extra;
    for (const auto& f : removed) {
      if (!want_keys.contains(f.canonical_key())) extra += " " + f.render();
    }
    return "removed set differs; unexpected:" + extra;
  }
  return {};
}

std::string funnel() {
  const auto run = t::nmc811_run();
  const auto dd = dedup_candidates(run, kTau);
  std::vector<Formula> unique;
  for (auto i : dd.unique) unique.push_back(run[i]);

  ScriptedBackend backend(Transcript::load(t::data_path("voltage_nmc811.jsonl")));
  ComparatorCache cache;
  const auto out = rank_candidates(unique, backend, cache, ValenceTable::standard(), SessionConfig{});

  if (out.charge_ranked.size() != 29) return "stage A kept " + std::to_string(out.charge_ranked.size());
  if (keys(out.charge_ranked) != keys(t::data_formulas("nmc811_charge_top29.csv"))) return "stage A set differs";
  if (out.complexity_excluded.size() != 9) return "stage B excluded " + std::to_string(out.complexity_excluded.size());
  if (out.complexity_filtered.size() != 20) return "stage B kept " + std::to_string(out.complexity_filtered.size());
  if (keys(out.complexity_filtered) != keys(t::data_formulas("nmc811_complexity_top20.csv"))) {
    return "stage B set differs";
  }
  const std::vector<Formula> top = {Formula::parse(kSiMg), Formula::parse(kMgB), Formula::parse(kSiCa)};
  if (out.voltage_ordered.size() != 3) return "stage C kept " + std::to_string(out.voltage_ordered.size());
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(out.voltage_ordered[i].formula == top[i])) return "stage C position " + std::to_string(i) + " is " +
                                                            out.voltage_ordered[i].formula.render();
  }
  if (backend.position() != backend.size()) return "transcript not fully consumed";
  return {};
}

std::size_t explore_count(const char* transcript, std::size_t k, std::size_t cycles, std::size_t trees) {
  SessionConfig config;
  config.k = k;
  config.cycles = cycles;
  config.trees = trees;
  auto session = start_session("acceptance", config, Formula::parse(kSeedText));
  ScriptedBackend backend(Transcript::load(t::data_path(transcript)));
  const Snapshot snapshot;
  MockRegistry registry;
  return run_exploration(*session, ExplorationContext{backend, snapshot, registry}).size();
}

std::string exploration() {
  const auto defaults = explore_count("explore_nmc811.jsonl", 5, 2, 4);
  if (defaults != 100) return "k=5 C=2 N=4 gave " + std::to_string(defaults);
  const auto small = explore_count("explore_k2c2n3.jsonl", 2, 2, 3);
  if (small != 12) return "k=2 C=2 N=3 gave " + std::to_string(small);
  return {};
}

// --- property suites -----------------------------------------------------

std::string distance_axioms(t::FormulaGen& gen) {
  for (int i = 0; i < 1000; ++i) {
    const auto a = gen.formula();
    const auto b = gen.formula();
    const auto c = gen.formula();
    const double ab = formula_distance(a, b);
    if (formula_distance(a, a) != 0.0) return "d(a,a) != 0 for " + a.render();
    if (ab < 0.0) return "negative distance";
    if (std::abs(ab - formula_distance(b, a)) > 1e-9) return "asymmetric for " + a.render() + ", " + b.render();
    if (formula_distance(a, c) > ab + formula_distance(b, c) + 1e-9) return "triangle inequality fails";
  }
  return {};
}

std::string range_match_props(t::FormulaGen& gen) {
  for (int i = 0; i < 1000; ++i) {
    const auto a = gen.formula();
    const auto b = gen.uniform(0, 1) ? gen.perturbed(a, 0.2) : gen.formula();
    const double tau = 0.01 + 0.9 * gen.unit();
    const double wider = tau + (0.99 - tau) * gen.unit();
    if (!range_match(a, a, tau)) return "not reflexive for " + a.render();
    if (range_match(a, b, tau) != range_match(b, a, tau)) return "not symmetric";
    if (range_match(a, b, tau) && !range_match(a, b, wider)) return "not monotone in tau";
  }
  return {};
}

std::string dedup_idempotence(t::FormulaGen& gen) {
  for (int i = 0; i < 200; ++i) {
    std::vector<Formula> items;
    for (std::size_t n = gen.uniform(0, 30); n > 0; --n) {
      if (!items.empty() && gen.uniform(0, 2) == 0) items.push_back(gen.perturbed(items[gen.uniform(0, items.size() - 1)], 0.15));
      else items.push_back(gen.formula());
    }
    std::vector<Formula> once;
    for (auto k : dedup_candidates(items, kTau).unique) once.push_back(items[k]);
    if (dedup_candidates(once, kTau).unique.size() != once.size()) return "second pass removed items";
  }
  return {};
}

std::string parser_round_trip(t::FormulaGen& gen) {
  for (int i = 0; i < 1000; ++i) {
    const auto terms = gen.terms();
    const auto text = gen.text(terms);
    const auto f = Formula::parse(text);
    if (!(f == Formula::from_terms(terms))) return "parse(" + text + ") differs from its terms";
    if (!(Formula::parse(f.render()) == f)) return "render round trip fails for " + text;
  }
  return {};
}

std::string merge_sort_bound(t::FormulaGen& gen) {
  for (std::size_t n = 2; n <= 32; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<int> items(n);
      std::iota(items.begin(), items.end(), 0);
      std::shuffle(items.begin(), items.end(), gen.rng());
      std::size_t calls = 0;
      const auto out = merge_sort_by_comparator(items, [&](int a, int b) {
        ++calls;
        return a < b;
      });
      const auto bound = n * static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n))));
      if (!std::is_sorted(out.begin(), out.end())) return "unsorted output for n=" + std::to_string(n);
      if (calls > bound) return std::to_string(calls) + " calls for n=" + std::to_string(n);
    }
  }
  return {};
}

// Captures the writer-side state just before each event is applied, so
// states[i] is the state a crash after event i must recover.
class ProbeSink final : public EventSink {
 public:
  const Session* session = nullptr;
  std::vector<std::string> states;
  void append(const Event&) override { states.push_back(session->state().to_json().dump()); }
};

std::string replay_equivalence() {
  ProbeSink* probe = new ProbeSink;
  std::shared_ptr<EventSink> sink(probe);
  SessionConfig config;
  config.k = 2;
  config.cycles = 1;
  config.trees = 1;
  Session session("replay", logical_clock(), sink);
  probe->session = &session;
  session.commit(event_type::kSessionCreated,
                 {{"session_id", "replay"}, {"seed", kSeedText}, {"config", to_json(config)}});

  // Three rounds: one existing hit, one unparsable reply, then the fill.
  Transcript script;
  auto reply = [](std::vector<std::string> fs) {
    std::string r;
    for (const auto& f : fs) r += "* " + f + ": lighter.\n";
    return r;
  };
  script.exchanges.push_back({{}, reply({"LiNi0.79Mn0.1Co0.1O2", "LiNi0.78Mn0.1Co0.1O2"})});
  script.exchanges.push_back({{}, "No ideas today."});
  script.exchanges.push_back({{}, reply({"LiNi0.77Mn0.1Co0.1O2"})});
  ScriptedBackend backend(script);
  const Snapshot snapshot;
  MockRegistry registry({Formula::parse("LiNi0.78Mn0.1Co0.1O2")});
  run_exploration(session, ExplorationContext{backend, snapshot, registry});
  if (session.state().tasks.at(0).rounds.size() != 3) return "expected a 3-round session";

  const auto events = session.events_after(0);
  if (probe->states.size() != events.size()) return "probe missed events";
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (SessionState::replay(std::span(events).first(i)).to_json().dump() != probe->states[i]) {
      return "replay differs after event " + std::to_string(i);
    }
  }
  if (SessionState::replay(events).to_json() != session.state().to_json()) return "full replay differs";
  return {};
}

std::string properties() {
  t::FormulaGen gen(20250101);
  for (auto* suite : {&distance_axioms, &range_match_props, &dedup_idempotence, &parser_round_trip, &merge_sort_bound}) {
    if (auto reason = suite(gen); !reason.empty()) return reason;
  }
  return replay_equivalence();
}

// --- determinism ---------------------------------------------------------

std::string full_run_log() {
  auto sink = std::make_shared<MemoryEventSink>();
  auto session = start_session("determinism", SessionConfig{}, Formula::parse(kSeedText), logical_clock(), sink);
  Transcript script = Transcript::load(t::data_path("explore_nmc811.jsonl"));
  const auto voltage = Transcript::load(t::data_path("voltage_nmc811.jsonl"));
  script.exchanges.insert(script.exchanges.end(), voltage.exchanges.begin(), voltage.exchanges.end());
  ScriptedBackend backend(script);
  const Snapshot snapshot;
  MockRegistry registry;
  run_exploration(*session, ExplorationContext{backend, snapshot, registry});
  run_dedup(*session);
  const auto outcome = run_rank(*session, backend);
  if (outcome.voltage_ordered.size() != 3 || !(outcome.voltage_ordered[0].formula == Formula::parse(kSiMg))) {
    throw Error(ErrorKind::InvalidArgument, "session ranking does not match the funnel");
  }
  std::string log;
  for (const auto& e : sink->events()) log += to_line(e) + "\n";
  return log;
}

std::string determinism() {
  const auto a = full_run_log();
  const auto b = full_run_log();
  if (a.empty()) return "empty log";
  if (a != b) return "event logs differ";
  return {};
}

}  // namespace

int main() {
  criterion("theoretical capacities", kBudgetFast, capacities);
  criterion("total charge of 29 formulas", kBudgetFast, charges);
  criterion("dedup 100 -> 89", kBudgetFast, dedup_golden);
  criterion("ranking funnel 89/29/20/3", kBudgetFunnel, funnel);
  criterion("exploration counts 100 and 12", kBudgetExploration, exploration);
  criterion("property suites", kBudgetProperties, properties);
  criterion("deterministic event logs", kBudgetDeterminism, determinism);
  std::printf("%s\n", failures == 0 ? "all criteria passed" : "some criteria failed");
  return failures == 0 ? 0 : 1;
}
