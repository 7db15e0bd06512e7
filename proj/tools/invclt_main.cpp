#include <iostream>

#include "invclt/cli.hpp"

int main(int argc, char** argv) { return invclt::cli_main(argc, argv, std::cout, std::cerr); }
