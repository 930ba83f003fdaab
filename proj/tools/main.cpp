#include <iostream>
#include <string>
#include <vector>

#include "anchormatch/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return anchormatch::run_commands(args, std::cout, std::cerr);
}
