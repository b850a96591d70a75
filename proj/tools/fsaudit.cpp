#include "fsaudit/cli.hpp"

#include <iostream>

int main(int argc, char **argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return fsaudit::cli::run(std::move(args), std::cout, std::cerr);
}
