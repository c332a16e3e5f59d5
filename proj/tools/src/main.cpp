#include <iostream>

#include "optbal/cli/commands.hpp"

int main(int argc, char** argv) { return optbal::cli::run(argc, argv, std::cout, std::cerr); }
