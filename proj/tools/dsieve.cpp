#include <iostream>

#include "dsieve/cli.hpp"

int main(int argc, char** argv) { return dsieve::run_cli(argc, argv, std::cerr); }
