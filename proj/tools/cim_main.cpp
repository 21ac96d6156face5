#include <string>
#include <vector>

#include "cim/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cim::cli::run(args);
}
