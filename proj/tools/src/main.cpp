#include <iostream>

#include "tasep/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tasep::cli::run(args, std::cout, std::cerr);
}
