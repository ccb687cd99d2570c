#include <iostream>

#include "loclim/cli.hpp"

int main(int argc, char** argv) {
  return loclim::cli::run(argc, argv, std::cout, std::cerr);
}
