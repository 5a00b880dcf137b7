#include <iostream>

#include "fvgrad/cli/cli.hpp"

int main(int argc, char** argv) { return fvgrad::cli::main_entry(argc, argv, std::cout, std::cerr); }
