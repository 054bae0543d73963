#include "ncv/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return ncv::run_cli(argc, argv, std::cout, std::cerr); }
