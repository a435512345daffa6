#include <iostream>

#include "thetacbc/cli.hpp"

int main(int argc, char** argv) { return thetacbc::run_cli(argc, argv, std::cout, std::cerr); }
