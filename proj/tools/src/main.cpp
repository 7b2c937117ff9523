#include <iostream>

#include "ortest_cli/cli.hpp"

int main(int argc, char** argv) { return ortest::cli::run_cli(argc, argv, std::cout, std::cerr); }
