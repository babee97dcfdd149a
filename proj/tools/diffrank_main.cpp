#include <iostream>

#include "diffrank/cli.hpp"

int main(int argc, char** argv) {
  return diffrank::run_cli(argc, argv, std::cout, std::cerr);
}
