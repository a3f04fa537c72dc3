#include <iostream>
#include <vector>

#include "recert/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return recert::run_cli(args, std::cout, std::cerr);
}
