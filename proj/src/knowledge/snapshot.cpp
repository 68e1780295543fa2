#include "cathode/knowledge/snapshot.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <set>
#include <utility>

#include "cathode/error.hpp"
#include "cathode/metrics/metrics.hpp"

namespace cathode {
namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

Snapshot::Snapshot(std::vector<CompoundRecord> records, std::string origin) : origin_(std::move(origin)) {
  std::set<std::pair<std::string, std::string>> seen;
  records_.reserve(records.size());
  for (auto& r : records) {
    if (!seen.emplace(r.formula.canonical_key(), r.source_id).second) continue;
    if (!r.capacity) r.capacity = theoretical_capacity(r.formula);
    records_.push_back(std::move(r));
  }
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileUnreadable, path.string());

  Snapshot snap;
  snap.origin_ = path.string();
  snap.loaded_at_ = utc_now();

  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_number = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;

    const auto comma = text.find(',');
    const std::string formula_text = trim(text.substr(0, comma));
    const std::string source_id = comma == std::string::npos ? std::string{} : trim(text.substr(comma + 1));

    if (!seen_content && lower(formula_text) == "formula") {
      seen_content = true;
      continue;
    }
    seen_content = true;

    if (source_id.empty()) {
      snap.malformed_.push_back({line_number, line, "missing source id"});
      continue;
    }
    try {
      Formula f = Formula::parse(formula_text);
      if (!seen.emplace(f.canonical_key(), source_id).second) {
        snap.malformed_.push_back({line_number, line, "duplicate record"});
        continue;
      }
      const double capacity = theoretical_capacity(f);
      snap.records_.push_back({std::move(f), source_id, capacity});
    } catch (const Error& e) {
      snap.malformed_.push_back({line_number, line, e.what()});
    }
  }
  if (snap.records_.empty()) {
    throw Error(ErrorKind::AllRecordsMalformed,
                path.string() + ": no valid records (" + std::to_string(snap.malformed_.size()) +
                    " malformed lines)");
  }
  return snap;
}

}  // namespace cathode
