#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cathode {

// Command-line front end. args excludes the program name. Returns 0 on
// success, 1 on a domain error and 2 on a usage error; diagnostics go to err.
//
//   parse <formula>                 capacity <formula>...
//   charge <formula>...             distance <a> <b>
//   dedup [--tau t] <file|formula>...
//   rank  [--skip-voltage] <file|formula>...
//   explore [--seed f] [--k n --cycles n --trees n] [--events-out path]
//   serve [--listen host:port]
//
// Global options: --json, --config <file>, --data-dir <dir>,
// --snapshot <csv>, --backend scripted:<path>|live.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cathode
