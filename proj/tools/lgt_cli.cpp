#include <iostream>

#include "lgt/cli.hpp"

int main(int argc, char** argv) { return lgt::cli::run_cli(argc, argv, std::cout, std::cerr); }
