#include <iostream>

#include "leadel/cli.hpp"

int main(int argc, char** argv) { return leadel::run_cli(argc, argv, std::cout, std::cerr); }
