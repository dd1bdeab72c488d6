#include <iostream>

#include "lazyppl/cli.hpp"

int main(int argc, char** argv) {
  return lazyppl::cli::main_entry(argc, argv, std::cout, std::cerr);
}
