#include <iostream>

#include "salfuse/cli.hpp"

int main(int argc, char** argv) {
  return salfuse::cli::run(argc, argv, std::cout, std::cerr);
}
