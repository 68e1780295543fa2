#pragma once

#include <nlohmann/json.hpp>

#include "cathode/metrics/metrics.hpp"

namespace cathode {

struct MetricsConfig {
  ValenceTable valences = ValenceTable::standard();
  GroupWeights weights = GroupWeights::standard();
};

// Reads the optional "valences", "distance_weights" and "distance_groups"
// keys of an engine config document:
//
//   "valences":         {"Ge": 4, "W": 6}            merged over the defaults
//   "distance_weights": [3, 7, 5, 10, 5, 1, 10]      or {"alpha": 3, ..., "eta": 10}
//   "distance_groups":  [["Li"], ["Mn","Co","Ni"], ...]   exactly five groups
//
// Throws ConfigInvalid on malformed values.
MetricsConfig metrics_from_json(const nlohmann::json& doc);

}  // namespace cathode
