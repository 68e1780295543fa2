#pragma once

#include <optional>

#include "cathode/knowledge/snapshot.hpp"
#include "cathode/metrics/metrics.hpp"

namespace cathode {

// First record, in snapshot order, that range-matches f.
std::optional<CompoundRecord> exists_range(const Formula& f, const Snapshot& snapshot, double tau);

// Retrieval for an invalid candidate: among records with higher capacity
// than input, the one closest to invalid under formula_distance. Ties go to
// the lower molecular weight, then the lexicographically smaller rendering.
std::optional<CompoundRecord> retrieve_similar(const Formula& invalid, const Formula& input,
                                               const Snapshot& snapshot,
                                               const GroupWeights& weights = GroupWeights::standard());

}  // namespace cathode
