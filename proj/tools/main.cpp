#include <iostream>

#include "nbody_cli/commands.hpp"

int main(int argc, char** argv) {
  return nbody::cli::main_entry(argc, argv, std::cout, std::cerr);
}
