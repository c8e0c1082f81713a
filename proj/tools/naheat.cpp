#include "naheat/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return naheat::run_cli(argc, argv, std::cout, std::cerr); }
