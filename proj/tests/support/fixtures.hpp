#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cathode/formula/formula.hpp"

namespace cathode::testing {

inline std::string data_path(const std::string& name) { return std::string(CATHODE_TEST_DATA) + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Non-empty lines of a data file; for CSV files the header is dropped and
// columns are returned whole.
inline std::vector<std::string> data_lines(const std::string& name) {
  std::vector<std::string> out;
  std::istringstream in(read_file(data_path(name)));
  std::string line;
  bool header = name.ends_with(".csv");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    out.push_back(line);
  }
  return out;
}

inline std::vector<Formula> data_formulas(const std::string& name) {
  std::vector<Formula> out;
  for (const auto& line : data_lines(name)) out.push_back(Formula::parse(line.substr(0, line.find(','))));
  return out;
}

inline std::string column(const std::string& line, std::size_t index) {
  std::size_t start = 0;
  for (std::size_t i = 0; i < index; ++i) start = line.find(',', start) + 1;
  return line.substr(start, line.find(',', start) - start);
}

// The NMC811 run: 100 second-cycle candidates in generation order.
inline std::vector<Formula> nmc811_run() { return data_formulas("nmc811_cycle2.txt"); }

}  // namespace cathode::testing
