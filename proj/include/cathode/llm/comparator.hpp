#pragma once

#include <functional>
#include <optional>
#include <shared_mutex>
#include <string>
#include <map>
#include <vector>

#include "cathode/error.hpp"
#include "cathode/llm/backend.hpp"

namespace cathode {

struct ComparisonRecord {
  Formula first;   // orientation of the request that produced the verdict
  Formula second;
  Formula winner;
  std::string response;  // raw text, or the operator note for manual verdicts
  std::string source = "llm";  // "llm" or "operator"
};

// Pairwise verdicts keyed by the unordered formula pair. Concurrent reads,
// exclusive writes.
class ComparatorCache {
 public:
  std::optional<ComparisonRecord> find(const Formula& a, const Formula& b) const;
  // Throws InvalidArgument when the winner is not one of the pair.
  void store(ComparisonRecord record);
  std::vector<ComparisonRecord> entries() const;
  std::size_t size() const;

 private:
  static std::pair<std::string, std::string> key(const Formula& a, const Formula& b);

  mutable std::shared_mutex mutex_;
  std::map<std::pair<std::string, std::string>, ComparisonRecord> entries_;
};

enum class Ordering { FirstWins, SecondWins };

// Raised when the comparator cannot produce a verdict after one retry; the
// pair is meant for operator review.
class ComparatorFailure : public Error {
 public:
  ComparatorFailure(Formula a, Formula b, std::string last_response, const std::string& reason);

  const Formula& first() const noexcept { return first_; }
  const Formula& second() const noexcept { return second_; }
  const std::string& last_response() const noexcept { return last_response_; }

 private:
  Formula first_;
  Formula second_;
  std::string last_response_;
};

struct CompareOptions {
  Sampling sampling;
  std::string model_tag;
};

// Which of a, b has the higher voltage. Cached verdicts are reused in either
// orientation; otherwise the voltage prompt is sent, parsed, cached and, if
// given, reported through on_verdict. A parse failure is retried once.
Ordering compare_voltage(const Formula& a, const Formula& b, LlmBackend& backend, ComparatorCache& cache,
                         const CompareOptions& options = {},
                         const std::function<void(const ComparisonRecord&)>& on_verdict = {});

}  // namespace cathode
