#include <iostream>
#include <string>
#include <vector>

#include "sirflock/runner.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return sirflock::run_command(args, std::cout, std::cerr);
}
