#include <iostream>

#include "dtnsim/cli.hpp"

int main(int argc, char** argv) { return dtnsim::cli::main(argc, argv, std::cout, std::cerr); }
