#include <iostream>
#include <string>
#include <vector>

#include "fibstat/cli_runner.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return fibstat::cli::run(args, std::cout, std::cerr);
}
