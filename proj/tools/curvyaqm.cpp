#include <iostream>

#include "curvyaqm/cli.hpp"

int main(int argc, char** argv) {
  return curvyaqm::cli::run_cli(argc, argv, std::cout, std::cerr);
}
