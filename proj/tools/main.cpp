#include <iostream>

#include "matchlab/cli.hpp"

int main(int argc, char** argv) { return matchlab::cli::run(argc, argv, std::cout, std::cerr); }
