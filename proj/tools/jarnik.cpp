#include <iostream>
#include <string>
#include <vector>

#include "jarnik/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return jarnik::cli::run(args, std::cout, std::cerr);
}
