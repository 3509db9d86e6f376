#include <iostream>

#include "rwprop/cli.hpp"

int main(int argc, char** argv) { return rwprop::cli::run(argc, argv, std::cout, std::cerr); }
