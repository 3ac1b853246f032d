#include <iostream>

#include "sleeperloc/cli.hpp"

int main(int argc, char** argv) { return sleeperloc::cli_main(argc, argv, std::cout, std::cerr); }
