#include "cathode/metrics/overrides.hpp"

#include "cathode/error.hpp"

namespace cathode {
namespace {

Element element_or_throw(const std::string& symbol) {
  auto e = Element::from_symbol(symbol);
  if (!e) throw Error(ErrorKind::ConfigInvalid, "unknown element '" + symbol + "'");
  return *e;
}

}  // namespace

MetricsConfig metrics_from_json(const nlohmann::json& doc) {
  MetricsConfig cfg;
  if (!doc.is_object()) return cfg;

  if (auto it = doc.find("valences"); it != doc.end()) {
    if (!it->is_object()) throw Error(ErrorKind::ConfigInvalid, "\"valences\" must be an object");
    for (const auto& [symbol, value] : it->items()) {
      if (!value.is_number_integer()) {
        throw Error(ErrorKind::ConfigInvalid, "valence of " + symbol + " must be an integer");
      }
      cfg.valences = cfg.valences.with(element_or_throw(symbol), value.get<int>());
    }
  }

  if (auto it = doc.find("distance_weights"); it != doc.end()) {
    static constexpr const char* kNames[] = {"alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta"};
    if (it->is_array()) {
      if (it->size() != GroupWeights::kLevels) {
        throw Error(ErrorKind::ConfigInvalid, "\"distance_weights\" needs 7 numbers");
      }
      for (std::size_t i = 0; i < GroupWeights::kLevels; ++i) {
        if (!(*it)[i].is_number()) throw Error(ErrorKind::ConfigInvalid, "distance weight must be a number");
        cfg.weights.weights[i] = (*it)[i].get<double>();
      }
    } else if (it->is_object()) {
      for (std::size_t i = 0; i < GroupWeights::kLevels; ++i) {
        if (auto w = it->find(kNames[i]); w != it->end()) {
          if (!w->is_number()) throw Error(ErrorKind::ConfigInvalid, "distance weight must be a number");
          cfg.weights.weights[i] = w->get<double>();
        }
      }
    } else {
      throw Error(ErrorKind::ConfigInvalid, "\"distance_weights\" must be an array or object");
    }
  }

  if (auto it = doc.find("distance_groups"); it != doc.end()) {
    if (!it->is_array() || it->size() != GroupWeights::kGroups) {
      throw Error(ErrorKind::ConfigInvalid, "\"distance_groups\" needs 5 element lists");
    }
    for (std::size_t g = 0; g < GroupWeights::kGroups; ++g) {
      const auto& list = (*it)[g];
      if (!list.is_array()) throw Error(ErrorKind::ConfigInvalid, "distance group must be a list");
      std::vector<Element> members;
      for (const auto& s : list) {
        if (!s.is_string()) throw Error(ErrorKind::ConfigInvalid, "distance group entries are symbols");
        members.push_back(element_or_throw(s.get<std::string>()));
      }
      cfg.weights.groups[g] = std::move(members);
    }
  }

  try {
    cfg.weights.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigInvalid, e.what());
  }
  return cfg;
}

}  // namespace cathode
