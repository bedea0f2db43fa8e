#include <iostream>

#include "dcxg/cli.h"

int main(int argc, char **argv) { return dcxg::Main(argc, argv, std::cin, std::cout, std::cerr); }
