#include "anosov/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return anosov::run_cli(argc, argv, std::cout, std::cerr);
}
