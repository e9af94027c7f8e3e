#include <iostream>

#include "finito/cli.hpp"

int main(int argc, char** argv) {
  return finito::cli::main(argc, argv, std::cout, std::cerr);
}
