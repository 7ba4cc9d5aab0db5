#include <iostream>

#include "pdiff/cli.hpp"

int main(int argc, char** argv) { return pdiff::cli::run(argc, argv, std::cout, std::cerr); }
