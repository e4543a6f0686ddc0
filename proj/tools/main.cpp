#include <iostream>

#include "fhodge/cli.hpp"

int main(int argc, char** argv) { return fhodge::cli_main(argc, argv, std::cout, std::cerr); }
