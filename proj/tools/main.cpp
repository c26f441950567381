#include <iostream>

#include "appcli.hpp"

int main(int argc, char** argv) { return bvarnu::cli::run_cli(argc, argv, std::cout, std::cerr); }
