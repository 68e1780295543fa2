#include "cathode/pipeline/dedup.hpp"

#include "cathode/metrics/metrics.hpp"

namespace cathode {

DedupResult dedup_candidates(std::span<const Formula> candidates, double tau) {
  DedupResult result;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    bool duplicate = false;
    for (std::size_t i : result.unique) {
      if (range_match(candidates[i], candidates[j], tau)) {
        result.removed.push_back({j, i});
        duplicate = true;
        break;
      }
    }
    if (!duplicate) result.unique.push_back(j);
  }
  return result;
}

}  // namespace cathode
