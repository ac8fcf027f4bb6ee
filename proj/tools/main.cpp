#include <iostream>

#include "patent/cli.hpp"

int main(int argc, char** argv) { return patent::cli::run(argc, argv, std::cout, std::cerr); }
