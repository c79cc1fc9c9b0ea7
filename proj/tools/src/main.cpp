#include <iostream>

#include "hyperball/cli/app.hpp"

int main(int argc, char** argv) { return hyperball::cli::run(argc, argv, std::cout, std::cerr); }
