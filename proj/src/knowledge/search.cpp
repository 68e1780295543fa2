#include "cathode/knowledge/search.hpp"

#include <tuple>

namespace cathode {

std::optional<CompoundRecord> exists_range(const Formula& f, const Snapshot& snapshot, double tau) {
  for (const auto& record : snapshot.records()) {
    if (range_match(f, record.formula, tau)) return record;
  }
  return std::nullopt;
}

std::optional<CompoundRecord> retrieve_similar(const Formula& invalid, const Formula& input,
                                               const Snapshot& snapshot, const GroupWeights& weights) {
  const double floor = theoretical_capacity(input);
  const CompoundRecord* best = nullptr;
  std::tuple<double, double, std::string> best_key;
  for (const auto& record : snapshot.records()) {
    const double capacity = record.capacity ? *record.capacity : theoretical_capacity(record.formula);
    if (!(capacity > floor)) continue;
    std::tuple<double, double, std::string> key{formula_distance(invalid, record.formula, weights),
                                                molecular_weight(record.formula), record.formula.render()};
    if (best == nullptr || key < best_key) {
      best = &record;
      best_key = std::move(key);
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

}  // namespace cathode
