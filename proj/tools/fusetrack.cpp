#include <iostream>
#include <string>
#include <vector>

#include "fusetrack/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return fusetrack::cli::run(args, std::cout, std::cerr);
}
