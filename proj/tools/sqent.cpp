#include <iostream>

#include "sqent/cli.hpp"

int main(int argc, char** argv) { return sqent::cli::run(argc, argv, std::cout, std::cerr); }
