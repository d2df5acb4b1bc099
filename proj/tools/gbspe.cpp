#include <iostream>
#include <string>
#include <vector>

#include "gbspe/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gbspe::cli::run(args, std::cout, std::cerr);
}
