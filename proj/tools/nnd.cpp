#include <iostream>
#include <string>
#include <vector>

#include "nnd/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return nnd::run_cli(args, std::cout, std::cerr);
}
