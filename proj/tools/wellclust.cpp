#include <iostream>

#include "wellclust/cli.hpp"

int main(int argc, char** argv) { return wellclust::run_cli(argc, argv, std::cout, std::cerr); }
