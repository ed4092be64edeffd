#include <iostream>

#include "weyl_lab/cli.hpp"

int main(int argc, char** argv) {
  return weyl_lab::cli::run(argc, argv, std::cout, std::cerr);
}
