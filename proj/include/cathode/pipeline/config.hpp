#pragma once

#include <cstddef>
#include <string>

#include <nlohmann/json.hpp>

#include "cathode/llm/backend.hpp"

namespace cathode {

struct SessionConfig {
  std::size_t k = 5;       // valid candidates required per parent
  std::size_t cycles = 2;  // C
  std::size_t trees = 4;   // N
  double tau = 0.1;        // range-match threshold
  std::size_t charge_top_n = 29;
  std::size_t complexity_max = 7;
  std::size_t complexity_top_n = 20;
  std::size_t voltage_top_m = 3;
  std::size_t max_rounds_per_cycle = 10;
  Sampling sampling;
  std::string generation_model = "gpt-3.5-turbo";
  std::string ranking_model = "gpt-o4";

  // Throws InvalidConfig.
  void validate() const;
  // N * k^C: final-cycle candidates when every round completes.
  std::size_t expected_candidates() const;
};

nlohmann::json to_json(const SessionConfig& config);
// Keys absent from doc keep the values of base. Throws InvalidConfig.
SessionConfig session_config_from_json(const nlohmann::json& doc, const SessionConfig& base = {});

}  // namespace cathode
