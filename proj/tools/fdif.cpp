#include <string>
#include <vector>

#include "fdif/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return fdif::run_cli(args);
}
