#include <iostream>
#include <string>
#include <vector>

#include "genflow/cli_app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return genflow::cli_main(std::move(args), std::cout, std::cerr);
}
