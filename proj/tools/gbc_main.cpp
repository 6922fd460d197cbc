#include <iostream>

#include "gbc/cli.hpp"

int main(int argc, char** argv) { return gbc::cli::run(argc, argv, std::cout, std::cerr); }
