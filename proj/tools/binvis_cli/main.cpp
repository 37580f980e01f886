#include <iostream>

#include "binvis_cli/cli.hpp"

int main(int argc, char** argv) {
  return binvis::cli::run(argc, argv, std::cout, std::cerr);
}
