#include <iostream>

#include "dispersal/cli.hpp"

int main(int argc, char** argv) {
    return dispersal::run_cli(argc, argv, std::cout, std::cerr);
}
