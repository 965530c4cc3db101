#include <iostream>

#include "uqcpt/cli.hpp"

int main(int argc, char** argv) { return uqcpt::cli::run(argc, argv, std::cout, std::cerr); }
