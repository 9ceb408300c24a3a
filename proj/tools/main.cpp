#include <iostream>

#include "muprobe/cli.hpp"

int main(int argc, char** argv) { return muprobe::cli::main(argc, argv, std::cout, std::cerr); }
