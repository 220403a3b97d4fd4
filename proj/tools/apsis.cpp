#include <iostream>

#include "apsis/cli.hpp"

int main(int argc, char** argv) { return apsis::run_cli(argc, argv, std::cout, std::cerr); }
