#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cathode {

enum class ErrorKind {
  // formula
  EmptyFormula,
  UnknownElement,
  MalformedCoefficient,
  InvalidCharacter,
  // metrics
  UnknownValence,
  InvalidArgument,
  // knowledge
  FileUnreadable,
  AllRecordsMalformed,
  RegistryUnavailable,
  // llm
  UnknownTemplate,
  MissingBinding,
  TemplateSyntax,
  NoCandidatesFound,
  AmbiguousWinner,
  NoMarkedLine,
  ComparatorFailure,
  TranscriptDrift,
  TranscriptExhausted,
  BackendUnavailable,
  // pipeline
  InvalidSeed,
  InvalidConfig,
  InvalidPhase,
  RoundBudgetExhausted,
  NotFound,
  // service
  ConfigInvalid,
  BindFailure,
  UnrecoverableLog,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cathode
