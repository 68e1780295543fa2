#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cathode/formula/formula.hpp"

namespace cathode {

struct CompoundRecord {
  Formula formula;
  std::string source_id;        // collection code or registry id
  std::optional<double> capacity;  // theoretical capacity cache, mAh/g
};

struct MalformedLine {
  std::size_t line_number;  // 1-based
  std::string text;
  std::string reason;
};

// Local copy of a compound database (ICSD-style export), immutable once
// built. Record order is the file order and matters for first-match search.
class Snapshot {
 public:
  Snapshot() = default;
  // Fills missing capacity caches; drops exact (formula, source_id) repeats.
  explicit Snapshot(std::vector<CompoundRecord> records, std::string origin = {});

  const std::vector<CompoundRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  const std::string& origin() const noexcept { return origin_; }
  const std::string& loaded_at() const noexcept { return loaded_at_; }
  const std::vector<MalformedLine>& malformed() const noexcept { return malformed_; }

 private:
  friend Snapshot load_snapshot(const std::filesystem::path& path);

  std::vector<CompoundRecord> records_;
  std::string origin_;
  std::string loaded_at_;
  std::vector<MalformedLine> malformed_;
};

// Reads "<formula>,<source_id>" lines (an optional "formula,..." header is
// skipped, blank lines and '#' comments ignored). Bad lines are collected in
// malformed(); throws FileUnreadable, or AllRecordsMalformed when no record
// survives.
Snapshot load_snapshot(const std::filesystem::path& path);

}  // namespace cathode
