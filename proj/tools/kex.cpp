#include <iostream>

#include "kex/cli.hpp"

int main(int argc, char** argv) { return kex::run_cli(argc, argv, std::cout, std::cerr); }
