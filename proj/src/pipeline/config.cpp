#include "cathode/pipeline/config.hpp"

#include <cmath>

#include "cathode/error.hpp"

namespace cathode {

void SessionConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::InvalidConfig, what);
  };
  require(k >= 1 && cycles >= 1 && trees >= 1, "k, cycles and trees must be >= 1");
  require(charge_top_n >= 1 && complexity_max >= 1 && complexity_top_n >= 1 && voltage_top_m >= 1,
          "ranking counts must be >= 1");
  require(max_rounds_per_cycle >= 1, "max_rounds_per_cycle must be >= 1");
  require(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1)");
  require(voltage_top_m <= complexity_top_n && complexity_top_n <= charge_top_n,
          "need voltage_top_m <= complexity_top_n <= charge_top_n");
  require(std::isfinite(sampling.temperature) && sampling.temperature >= 0.0, "temperature must be finite and >= 0");
  require(std::isfinite(sampling.frequency_penalty), "frequency_penalty must be finite");
}

std::size_t SessionConfig::expected_candidates() const {
  std::size_t total = trees;
  for (std::size_t c = 0; c < cycles; ++c) total *= k;
  return total;
}

nlohmann::json to_json(const SessionConfig& c) {
  return {
      {"k", c.k},
      {"cycles", c.cycles},
      {"trees", c.trees},
      {"tau", c.tau},
      {"charge_top_n", c.charge_top_n},
      {"complexity_max", c.complexity_max},
      {"complexity_top_n", c.complexity_top_n},
      {"voltage_top_m", c.voltage_top_m},
      {"max_rounds_per_cycle", c.max_rounds_per_cycle},
      {"sampling", {{"temperature", c.sampling.temperature}, {"frequency_penalty", c.sampling.frequency_penalty}}},
      {"generation_model", c.generation_model},
      {"ranking_model", c.ranking_model},
  };
}

SessionConfig session_config_from_json(const nlohmann::json& doc, const SessionConfig& base) {
  SessionConfig c = base;
  if (doc.is_null()) return c;
  if (!doc.is_object()) throw Error(ErrorKind::InvalidConfig, "session config must be an object");
  try {
    auto count = [&](const char* key, std::size_t& field) {
      if (auto it = doc.find(key); it != doc.end()) {
        if (!it->is_number_integer() || it->get<long long>() < 0) {
          throw Error(ErrorKind::InvalidConfig, std::string(key) + " must be a nonnegative integer");
        }
        field = it->get<std::size_t>();
      }
    };
    count("k", c.k);
    count("cycles", c.cycles);
    count("trees", c.trees);
    count("charge_top_n", c.charge_top_n);
    count("complexity_max", c.complexity_max);
    count("complexity_top_n", c.complexity_top_n);
    count("voltage_top_m", c.voltage_top_m);
    count("max_rounds_per_cycle", c.max_rounds_per_cycle);
    if (auto it = doc.find("tau"); it != doc.end()) c.tau = it->get<double>();
    if (auto it = doc.find("sampling"); it != doc.end()) {
      c.sampling.temperature = it->value("temperature", c.sampling.temperature);
      c.sampling.frequency_penalty = it->value("frequency_penalty", c.sampling.frequency_penalty);
    }
    c.generation_model = doc.value("generation_model", c.generation_model);
    c.ranking_model = doc.value("ranking_model", c.ranking_model);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, e.what());
  }
  c.validate();
  return c;
}

}  // namespace cathode
