#include <iostream>

#include "msls/cli.hpp"

int main(int argc, char** argv) { return msls::run_cli(argc, argv, std::cout, std::cerr); }
