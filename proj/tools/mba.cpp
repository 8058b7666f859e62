#include <iostream>

#include "mba/cli.hpp"

int main(int argc, char** argv) { return mba::cli::run(argc, argv, std::cout, std::cerr); }
