#include "flowtube/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return flowtube::cli::run(argc, argv, std::cout, std::cerr);
}
