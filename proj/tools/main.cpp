#include <iostream>
#include <string>
#include <vector>

#include "cogstream/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cogstream::cli::run(args, std::cout, std::cerr, std::cin);
}
