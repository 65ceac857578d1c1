#include "slpulse/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return slpulse::cli_dispatch(std::move(args));
}
