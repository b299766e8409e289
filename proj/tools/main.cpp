#include <iostream>

#include "curvealign/cli.hpp"

int main(int argc, char** argv) {
    return curvealign::cli_main(argc, argv, std::cout, std::cerr);
}
