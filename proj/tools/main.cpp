#include <iostream>
#include <string>
#include <vector>

#include "treexplain/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return treexplain::run_cli(args, std::cout, std::cerr);
}
