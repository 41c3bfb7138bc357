#include "tonekit/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return tonekit::cli::run(argc, argv, std::cout, std::cerr); }
