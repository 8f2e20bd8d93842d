#include <iostream>

#include "memswitch/cli/commands.hpp"

int main(int argc, char** argv) {
    return memswitch::cli::run_cli(argc, argv, std::cout, std::cerr);
}
