#include <iostream>

#include "danneal/cli.hpp"

int main(int argc, char** argv) {
    return danneal::cli_main(argc, argv, std::cout, std::cerr);
}
