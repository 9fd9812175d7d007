#include <iostream>
#include <string>
#include <vector>

#include "apf/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return apf::cli::run(args, std::cout, std::cerr);
}
