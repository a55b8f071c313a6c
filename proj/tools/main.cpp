#include <iostream>

#include "cmacg/cli.hpp"

int main(int argc, char** argv) { return cmacg::cli::run(argc, argv, std::cout, std::cerr); }
