#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "cathode/error.hpp"
#include "cathode/knowledge/registry.hpp"
#include "cathode/knowledge/search.hpp"
#include "cathode/knowledge/snapshot.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace cathode;

namespace {

Formula F(const char* s) { return Formula::parse(s); }

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& content) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("cathode_snapshot_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".csv");
    std::ofstream(path) << content;
  }
  ~TempFile() { std::filesystem::remove(path); }
};

Snapshot snapshot_of(std::initializer_list<const char*> formulas) {
  std::vector<CompoundRecord> records;
  int i = 0;
  for (const char* f : formulas) records.push_back({F(f), "rec-" + std::to_string(i++), std::nullopt});
  return Snapshot(std::move(records), "memory");
}

// Brute force over every record; mirrors the documented tie-break.
std::optional<CompoundRecord> oracle_retrieve(const Formula& invalid, const Formula& input, const Snapshot& s) {
  std::optional<CompoundRecord> best;
  for (const auto& r : s.records()) {
    if (!(theoretical_capacity(r.formula) > theoretical_capacity(input))) continue;
    if (!best) {
      best = r;
      continue;
    }
    const double d = formula_distance(invalid, r.formula);
    const double bd = formula_distance(invalid, best->formula);
    const double mw = molecular_weight(r.formula);
    const double bmw = molecular_weight(best->formula);
    if (d < bd || (d == bd && (mw < bmw || (mw == bmw && r.formula.render() < best->formula.render())))) best = r;
  }
  return best;
}

}  // namespace

TEST_CASE("load snapshot") {
  TempFile file("LiCoO2,icsd-0001\nLi2MnO3,icsd-0002\n");
  const auto s = load_snapshot(file.path);
  REQUIRE(s.size() == 2);
  CHECK(s.records()[0].source_id == "icsd-0001");
  CHECK(s.records()[1].formula == F("Li2MnO3"));
  REQUIRE(s.records()[0].capacity.has_value());
  CHECK(std::abs(*s.records()[0].capacity - theoretical_capacity(F("LiCoO2"))) < 1e-9);
  CHECK(s.origin() == file.path.string());
  CHECK_FALSE(s.loaded_at().empty());
}

TEST_CASE("load snapshot: header, comments, malformed lines, repeats") {
  TempFile file("formula,source_id\n# exported\n\nLiCoO2,a\nLiCoO2,a\nQq2,b\nLiFePO4,c\n,d\n");
  const auto s = load_snapshot(file.path);
  CHECK(s.size() == 2);
  REQUIRE(s.malformed().size() == 3);
  CHECK(s.malformed()[0].line_number == 5);
  CHECK(s.malformed()[0].reason == "duplicate record");
  CHECK(s.malformed()[1].line_number == 6);
}

TEST_CASE("load snapshot errors") {
  TempFile empty("");
  try {
    load_snapshot(empty.path);
    FAIL("expected AllRecordsMalformed");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AllRecordsMalformed);
  }
  try {
    load_snapshot("/nonexistent/snapshot.csv");
    FAIL("expected FileUnreadable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FileUnreadable);
  }
}

TEST_CASE("snapshot of the NMC811 run") {
  std::string content;
  int i = 0;
  for (const auto& f : testing::data_lines("nmc811_cycle2.txt")) content += f + ",run-" + std::to_string(i++) + "\n";
  TempFile file(content);
  CHECK(load_snapshot(file.path).size() == 100);
}

TEST_CASE("mock registry") {
  MockRegistry registry({F("LiNi0.8Mn0.1Co0.1O2")});
  CHECK(exists_exact(F("LiNi0.8Mn0.1Co0.1O2"), registry));
  CHECK(exists_exact(F("O2Co0.1Mn0.1Ni0.8Li"), registry));
  CHECK_FALSE(exists_exact(F("LiCoO2"), registry));
  registry.add(F("LiCoO2"));
  CHECK(exists_exact(F("LiCoO2"), registry));
}

TEST_CASE("http registry without a reachable server") {
  HttpRegistrySettings settings;
  settings.base_url = "http://127.0.0.1:1";
  settings.max_attempts = 2;
  settings.timeout = std::chrono::milliseconds(200);
  HttpRegistryClient client(settings);
  try {
    client.exists(F("LiCoO2"));
    FAIL("expected RegistryUnavailable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RegistryUnavailable);
  }
}

TEST_CASE("exists_range") {
  const auto nmc = F("LiNi0.8Mn0.1Co0.1O2");
  auto hit = exists_range(nmc, snapshot_of({"LiCoO2", "LiNi0.8Mn0.1Co0.1O2"}), 0.1);
  REQUIRE(hit);
  CHECK(hit->source_id == "rec-1");
  CHECK(exists_range(nmc, snapshot_of({"LiNi0.75Mn0.1Co0.1O2"}), 0.1));
  CHECK_FALSE(exists_range(nmc, snapshot_of({"LiFePO4"}), 0.1));
  // First match in file order wins.
  auto first = exists_range(nmc, snapshot_of({"LiNi0.78Mn0.1Co0.1O2", "LiNi0.8Mn0.1Co0.1O2"}), 0.1);
  REQUIRE(first);
  CHECK(first->source_id == "rec-0");
}

TEST_CASE("retrieve_similar") {
  const auto nmc = F("LiNi0.8Mn0.1Co0.1O2");
  CHECK_FALSE(retrieve_similar(nmc, nmc, Snapshot{}));
  auto hit = retrieve_similar(F("LiCoO2"), nmc, snapshot_of({"LiCoO2", "Li2MnO3"}));
  REQUIRE(hit);
  CHECK(hit->formula == F("Li2MnO3"));
  // Equal distance: the lighter record wins.
  auto tie = retrieve_similar(F("LiCoO2"), F("LiCoO4"), snapshot_of({"LiNiO2.5", "LiNiO1.5"}));
  REQUIRE(tie);
  CHECK(tie->formula == F("LiNiO1.5"));
}

TEST_CASE("property: retrieval satisfies decide and equals brute force") {
  testing::FormulaGen gen(31337);
  for (int round = 0; round < 60; ++round) {
    std::vector<CompoundRecord> records;
    const std::size_t n = gen.uniform(0, 25);
    for (std::size_t i = 0; i < n; ++i) records.push_back({gen.formula(), "r" + std::to_string(i), std::nullopt});
    const Snapshot s(records, "gen");
    const auto input = gen.formula();
    const auto invalid = gen.formula();
    const auto got = retrieve_similar(invalid, input, s);
    const auto want = oracle_retrieve(invalid, input, s);
    REQUIRE(got.has_value() == want.has_value());
    if (got) {
      CHECK(decide(input, got->formula));
      CHECK(got->formula == want->formula);
    }
    // Record order does not change the answer.
    std::reverse(records.begin(), records.end());
    const auto reversed = retrieve_similar(invalid, input, Snapshot(records, "gen"));
    REQUIRE(reversed.has_value() == got.has_value());
    if (got) CHECK(reversed->formula == got->formula);
  }
}
