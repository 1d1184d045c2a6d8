#include <iostream>

#include "credeval/cli.hpp"

int main(int argc, char** argv) { return credeval::run_cli(argc, argv, std::cout, std::cerr); }
