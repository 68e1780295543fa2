#include "cathode/pipeline/candidate.hpp"

#include "cathode/error.hpp"

namespace cathode {

std::string_view to_string(CandidateStatus status) {
  switch (status) {
    case CandidateStatus::Valid: return "valid";
    case CandidateStatus::InvalidCapacity: return "invalid_capacity";
    case CandidateStatus::Existing: return "existing";
    case CandidateStatus::Duplicate: return "duplicate";
    case CandidateStatus::Selected: return "selected";
  }
  return "unknown";
}

CandidateStatus candidate_status_from_string(std::string_view name) {
  for (auto s : {CandidateStatus::Valid, CandidateStatus::InvalidCapacity, CandidateStatus::Existing,
                 CandidateStatus::Duplicate, CandidateStatus::Selected}) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown candidate status '" + std::string(name) + "'");
}

nlohmann::json to_json(const CandidateRecord& r) {
  nlohmann::json doc{
      {"index", r.index},
      {"formula", r.formula.render()},
      {"status", to_string(r.status)},
      {"parent", r.parent.render()},
      {"task", r.task},
      {"tree", r.tree},
      {"cycle", r.cycle},
      {"round", r.round},
      {"reasoning", r.reasoning},
      {"capacity", r.capacity},
      {"flagged", r.flagged},
  };
  doc["parent_candidate"] = r.parent_candidate ? nlohmann::json(*r.parent_candidate) : nlohmann::json(nullptr);
  doc["retrieved_hint"] = r.retrieved_hint ? nlohmann::json(r.retrieved_hint->render()) : nlohmann::json(nullptr);
  doc["existing_source"] = r.existing_source ? nlohmann::json(*r.existing_source) : nlohmann::json(nullptr);
  if (r.flagged) doc["flag_note"] = r.flag_note;
  return doc;
}

CandidateRecord candidate_from_json(const nlohmann::json& doc) {
  CandidateRecord r{.formula = Formula::parse(doc.at("formula").get<std::string>()),
                    .parent = Formula::parse(doc.at("parent").get<std::string>())};
  r.index = doc.at("index").get<std::size_t>();
  r.status = candidate_status_from_string(doc.at("status").get<std::string>());
  r.task = doc.at("task").get<std::size_t>();
  r.tree = doc.at("tree").get<std::size_t>();
  r.cycle = doc.at("cycle").get<std::size_t>();
  r.round = doc.at("round").get<std::size_t>();
  r.reasoning = doc.value("reasoning", "");
  r.capacity = doc.value("capacity", 0.0);
  r.flagged = doc.value("flagged", false);
  r.flag_note = doc.value("flag_note", "");
  if (auto it = doc.find("parent_candidate"); it != doc.end() && !it->is_null()) r.parent_candidate = it->get<std::size_t>();
  if (auto it = doc.find("retrieved_hint"); it != doc.end() && !it->is_null()) {
    r.retrieved_hint = Formula::parse(it->get<std::string>());
  }
  if (auto it = doc.find("existing_source"); it != doc.end() && !it->is_null()) {
    r.existing_source = it->get<std::string>();
  }
  return r;
}

}  // namespace cathode
