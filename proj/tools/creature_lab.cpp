#include "creature_lab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return cl::run_cli(argc, argv, std::cout, std::cerr); }
