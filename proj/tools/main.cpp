#include <iostream>

#include "m2m/cli.hpp"

int main(int argc, char** argv) { return m2m::run_cli(argc, argv, std::cout, std::cerr); }
