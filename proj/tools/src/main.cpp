#include <iostream>

#include "stadium_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return stadium::cli::run(args, std::cout, std::cerr);
}
