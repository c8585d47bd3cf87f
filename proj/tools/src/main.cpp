#include <iostream>

#include "fhnkit/commands.hpp"

int main(int argc, char** argv) { return fhnkit::run(argc, argv, std::cout, std::cerr); }
