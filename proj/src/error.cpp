#include "cathode/error.hpp"

namespace cathode {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyFormula: return "EmptyFormula";
    case ErrorKind::UnknownElement: return "UnknownElement";
    case ErrorKind::MalformedCoefficient: return "MalformedCoefficient";
    case ErrorKind::InvalidCharacter: return "InvalidCharacter";
    case ErrorKind::UnknownValence: return "UnknownValence";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::FileUnreadable: return "FileUnreadable";
    case ErrorKind::AllRecordsMalformed: return "AllRecordsMalformed";
    case ErrorKind::RegistryUnavailable: return "RegistryUnavailable";
    case ErrorKind::UnknownTemplate: return "UnknownTemplate";
    case ErrorKind::MissingBinding: return "MissingBinding";
    case ErrorKind::TemplateSyntax: return "TemplateSyntax";
    case ErrorKind::NoCandidatesFound: return "NoCandidatesFound";
    case ErrorKind::AmbiguousWinner: return "AmbiguousWinner";
    case ErrorKind::NoMarkedLine: return "NoMarkedLine";
    case ErrorKind::ComparatorFailure: return "ComparatorFailure";
    case ErrorKind::TranscriptDrift: return "TranscriptDrift";
    case ErrorKind::TranscriptExhausted: return "TranscriptExhausted";
    case ErrorKind::BackendUnavailable: return "BackendUnavailable";
    case ErrorKind::InvalidSeed: return "InvalidSeed";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::InvalidPhase: return "InvalidPhase";
    case ErrorKind::RoundBudgetExhausted: return "RoundBudgetExhausted";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::BindFailure: return "BindFailure";
    case ErrorKind::UnrecoverableLog: return "UnrecoverableLog";
  }
  return "Unknown";
}

}  // namespace cathode
