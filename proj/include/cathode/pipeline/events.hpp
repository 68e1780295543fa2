#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cathode {

namespace event_type {
inline constexpr const char* kSessionCreated = "session_created";
inline constexpr const char* kTaskOpened = "task_opened";
inline constexpr const char* kRoundStarted = "round_started";
inline constexpr const char* kLlmExchange = "llm_exchange";
inline constexpr const char* kRoundEvaluated = "round_evaluated";
inline constexpr const char* kRoundBudgetExhausted = "round_budget_exhausted";
inline constexpr const char* kExplorationCompleted = "exploration_completed";
inline constexpr const char* kDedupCompleted = "dedup_completed";
inline constexpr const char* kCandidateExcluded = "candidate_excluded";
inline constexpr const char* kRankCompleted = "rank_completed";
inline constexpr const char* kRankFailed = "rank_failed";
inline constexpr const char* kComparisonVerdict = "comparison_verdict";
inline constexpr const char* kOperatorVerdict = "operator_verdict";
inline constexpr const char* kCandidateFlagged = "candidate_flagged";
inline constexpr const char* kPromptOverrideSet = "prompt_override_set";
}  // namespace event_type

struct Event {
  std::uint64_t seq = 0;  // 1-based, strictly increasing
  std::string type;
  std::string timestamp;
  nlohmann::json payload;
};

nlohmann::json to_json(const Event& event);
Event event_from_json(const nlohmann::json& doc);
// One JSON line without the trailing newline.
std::string to_line(const Event& event);

// Produces the timestamp for the event with the given sequence number.
using Clock = std::function<std::string(std::uint64_t seq)>;
// UTC wall clock, millisecond resolution.
Clock system_clock();
// 2000-01-01T00:00:00.000Z plus one millisecond per event; reproducible.
Clock logical_clock();

class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void append(const Event& event) = 0;
};

class MemoryEventSink final : public EventSink {
 public:
  void append(const Event& event) override {
    std::lock_guard lock(mutex_);
    events_.push_back(event);
  }
  std::vector<Event> events() const {
    std::lock_guard lock(mutex_);
    return events_;
  }

 private:
  mutable std::mutex mutex_;
  std::vector<Event> events_;
};

// Append-only JSON-lines file; every append is flushed before returning.
class FileEventLog final : public EventSink {
 public:
  explicit FileEventLog(std::filesystem::path path);
  void append(const Event& event) override;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
  std::ofstream out_;
};

struct EventLogRead {
  std::vector<Event> events;
  bool truncated_tail = false;  // a torn final line was dropped
  std::string warning;
};

// Reads a JSON-lines log. A final line that is incomplete or unparsable is
// dropped (and, with repair, cut from the file) and reported in warning;
// damage anywhere else throws UnrecoverableLog.
EventLogRead read_event_log(const std::filesystem::path& path, bool repair = false);

}  // namespace cathode
