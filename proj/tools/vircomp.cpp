#include <iostream>
#include <string>
#include <vector>

#include "vircomp/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return vircomp::cli::run(args, std::cout, std::cerr);
}
