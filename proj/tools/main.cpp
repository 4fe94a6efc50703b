#include <iostream>

#include "dispersar/cli.hpp"

int main(int argc, char** argv) {
  return dispersar::cli::run_app(argc, argv, std::cout, std::cerr);
}
