#include <iostream>
#include <string>
#include <vector>

#include "sysfree/cli_io.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sysfree::cli::run(args, std::cout, std::cerr);
}
