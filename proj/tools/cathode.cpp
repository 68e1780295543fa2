#include <iostream>
#include <string>
#include <vector>

#include "cathode/service/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cathode::run_cli(args, std::cout, std::cerr);
}
