#include <iostream>

#include "sparsep/cli.hpp"

int main(int argc, char **argv) { return sparsep::cli_main(argc, argv, std::cout, std::cerr); }
