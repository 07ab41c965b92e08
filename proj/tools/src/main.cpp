#include <string>
#include <vector>

#include "gtrx/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gtrx::cli::run(args);
}
