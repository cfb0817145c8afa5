#include <iostream>

#include "srgcert/cli.hpp"

int main(int argc, char** argv) { return srgcert::run_cli(argc, argv, std::cout, std::cerr); }
