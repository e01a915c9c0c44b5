#include <iostream>
#include <string>
#include <vector>

#include "dinicert/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dinicert::cli::run(std::move(args), std::cout, std::cerr);
}
