#include <iostream>

#include "polaron/cli.hpp"

int main(int argc, char** argv) { return polaron::cli::run(argc, argv, std::cout, std::cerr); }
