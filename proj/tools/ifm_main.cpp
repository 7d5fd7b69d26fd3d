#include <iostream>
#include <string>
#include <vector>

#include "ifm/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ifm::cli::run(args, std::cout, std::cerr);
}
