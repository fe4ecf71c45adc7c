#include <iostream>

#include "hampath/cli.hpp"

int main(int argc, char** argv) { return hampath::cli::run(argc, argv, std::cout, std::cerr); }
