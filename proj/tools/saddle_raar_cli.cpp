#include <iostream>

#include "saddle_raar/cli.hpp"

int main(int argc, char** argv) { return saddle_raar::cli::run_main(argc, argv, std::cout, std::cerr); }
