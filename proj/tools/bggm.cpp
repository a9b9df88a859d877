#include "bggm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return bggm::run_cli(argc, argv, std::cout, std::cerr); }
