#include <iostream>
#include <string>
#include <vector>

#include "houses/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return houses::cli::main(args, std::cout, std::cerr);
}
