#include "cathode/pipeline/events.hpp"

#include <chrono>
#include <ctime>
#include <sstream>

#include "cathode/error.hpp"

namespace cathode {
namespace {

std::string format_utc(std::chrono::system_clock::time_point tp) {
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(tp.time_since_epoch()).count();
  const std::time_t seconds = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&seconds, &tm);
  char buf[40];
  const auto n = std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", &tm);
  std::snprintf(buf + n, sizeof(buf) - n, ".%03dZ", static_cast<int>(ms % 1000));
  return buf;
}

}  // namespace

nlohmann::json to_json(const Event& e) {
  return {{"seq", e.seq}, {"type", e.type}, {"timestamp", e.timestamp}, {"payload", e.payload}};
}

Event event_from_json(const nlohmann::json& doc) {
  Event e;
  e.seq = doc.at("seq").get<std::uint64_t>();
  e.type = doc.at("type").get<std::string>();
  e.timestamp = doc.at("timestamp").get<std::string>();
  e.payload = doc.at("payload");
  return e;
}

std::string to_line(const Event& event) { return to_json(event).dump(); }

Clock system_clock() {
  return [](std::uint64_t) { return format_utc(std::chrono::system_clock::now()); };
}

Clock logical_clock() {
  return [](std::uint64_t seq) {
    constexpr std::int64_t kEpoch2000 = 946684800;
    const auto tp = std::chrono::system_clock::time_point(std::chrono::seconds(kEpoch2000)) +
                    std::chrono::milliseconds(static_cast<std::int64_t>(seq));
    return format_utc(tp);
  };
}

FileEventLog::FileEventLog(std::filesystem::path path) : path_(std::move(path)) {
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw Error(ErrorKind::FileUnreadable, "cannot open event log " + path_.string());
}

void FileEventLog::append(const Event& event) {
  std::lock_guard lock(mutex_);
  out_ << to_line(event) << '\n';
  out_.flush();
  if (!out_) throw Error(ErrorKind::FileUnreadable, "write failed on " + path_.string());
}

EventLogRead read_event_log(const std::filesystem::path& path, bool repair) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileUnreadable, path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  in.close();

  EventLogRead result;
  std::size_t pos = 0;
  std::size_t line_number = 0;
  std::size_t good_end = 0;  // byte offset after the last good line
  while (pos < content.size()) {
    ++line_number;
    const auto nl = content.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    const std::string line = content.substr(pos, terminated ? nl - pos : std::string::npos);
    const std::size_t next = terminated ? nl + 1 : content.size();
    const bool last = next >= content.size();

    std::string error;
    if (!terminated) {
      error = "missing newline";
    } else {
      try {
        Event e = event_from_json(nlohmann::json::parse(line));
        const std::uint64_t expected = result.events.empty() ? 1 : result.events.back().seq + 1;
        if (e.seq != expected) error = "sequence gap";
        else result.events.push_back(std::move(e));
      } catch (const std::exception& ex) {
        error = ex.what();
      }
    }
    if (!error.empty()) {
      if (!last) {
        throw Error(ErrorKind::UnrecoverableLog,
                    path.string() + " line " + std::to_string(line_number) + ": " + error);
      }
      result.truncated_tail = true;
      result.warning = path.string() + ": dropped torn line " + std::to_string(line_number) + " (" + error + ")";
      break;
    }
    good_end = next;
    pos = next;
  }
  if (result.truncated_tail && repair) std::filesystem::resize_file(path, good_end);
  return result;
}

}  // namespace cathode
