#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "cathode/formula/formula.hpp"

namespace cathode {

// Faraday constant as used by the capacity surrogate (C/mol).
inline constexpr double kFaraday = 96500.0;

// Heuristic oxidation states used for total charge.
class ValenceTable {
 public:
  // The 30-entry default table (Li +1, O -2, Ni/Mn/Co +3, ...).
  static const ValenceTable& standard();

  ValenceTable() = default;
  explicit ValenceTable(std::map<Element, int> entries) : entries_(std::move(entries)) {}

  // Copy with e set to valence (added or replaced).
  ValenceTable with(Element e, int valence) const;

  std::optional<int> valence(Element e) const;
  const std::map<Element, int>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::map<Element, int> entries_;
};

// Weights and element groups of the seven-level formula distance. Levels
// 1-5 sum the coefficients of their member elements, level 6 sums every
// other element and level 7 is the species count.
struct GroupWeights {
  static constexpr std::size_t kLevels = 7;
  static constexpr std::size_t kGroups = 5;

  std::array<double, kLevels> weights{3, 7, 5, 10, 5, 1, 10};
  std::array<std::vector<Element>, kGroups> groups;

  static const GroupWeights& standard();

  // Throws InvalidArgument on negative weights or an element in two groups.
  void validate() const;

  std::array<double, kLevels> levels(const Formula& f) const;
};

// n * F / (3.6 * M) in mAh/g with n = Li coefficient; 0 without lithium.
double theoretical_capacity(const Formula& f, const PeriodicTable& table = PeriodicTable::standard());

// Sum of coefficient * valence. Throws UnknownValence for any element
// missing from the table.
double total_charge(const Formula& f, const ValenceTable& valences = ValenceTable::standard());

inline std::size_t preparation_complexity(const Formula& f) { return f.species_count(); }

double formula_distance(const Formula& a, const Formula& b,
                        const GroupWeights& weights = GroupWeights::standard());

// Per-element relative difference |ca - cb| / max(ca, cb) <= tau over the
// union of elements. tau must lie in (0, 1).
bool range_match(const Formula& a, const Formula& b, double tau);

// True when output has strictly higher theoretical capacity than input.
bool decide(const Formula& input, const Formula& output,
            const PeriodicTable& table = PeriodicTable::standard());

}  // namespace cathode
