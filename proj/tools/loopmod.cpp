#include <iostream>
#include <string>
#include <vector>

#include "loopmod/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return loopmod::run_cli(args, std::cout, std::cerr);
}
