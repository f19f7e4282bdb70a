#include <iostream>

#include "ddtop/cli.hpp"

int main(int argc, char** argv) { return ddtop::cli::main(argc, argv, std::cout, std::cerr); }
