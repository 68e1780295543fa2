#pragma once

#include <span>
#include <vector>

#include "cathode/formula/formula.hpp"

namespace cathode {

struct DedupResult {
  std::vector<std::size_t> unique;  // survivor positions, input order
  struct Removal {
    std::size_t index;
    std::size_t duplicate_of;  // the earlier survivor it range-matched
  };
  std::vector<Removal> removed;
};

// Keeps the first occurrence: each item is compared with the survivors so
// far and dropped when it range-matches one of them. Order-sensitive.
DedupResult dedup_candidates(std::span<const Formula> candidates, double tau);

}  // namespace cathode
