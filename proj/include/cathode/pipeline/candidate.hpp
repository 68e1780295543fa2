#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "cathode/formula/formula.hpp"

namespace cathode {

enum class CandidateStatus { Valid, InvalidCapacity, Existing, Duplicate, Selected };

std::string_view to_string(CandidateStatus status);
CandidateStatus candidate_status_from_string(std::string_view name);

// One generated formula with its audit trail.
struct CandidateRecord {
  std::size_t index = 0;  // position in the session's candidate list
  Formula formula;
  CandidateStatus status = CandidateStatus::Valid;
  Formula parent;  // formula the round was optimizing
  std::optional<std::size_t> parent_candidate;  // index of parent when it is itself a candidate
  std::size_t task = 0;
  std::size_t tree = 0;   // 0-based
  std::size_t cycle = 1;  // 1-based
  std::size_t round = 1;  // 1-based, within the task
  std::optional<Formula> retrieved_hint;     // only for InvalidCapacity
  std::optional<std::string> existing_source;  // registry or snapshot id for Existing
  std::string reasoning;
  double capacity = 0.0;
  bool flagged = false;
  std::string flag_note;
};

nlohmann::json to_json(const CandidateRecord& record);
CandidateRecord candidate_from_json(const nlohmann::json& doc);

}  // namespace cathode
