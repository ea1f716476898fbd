#include <vector>
#include <string>

#include "expw/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return expw::cli_main(std::move(args));
}
