#include "conet/cli.hpp"

int main(int argc, char** argv) {
    return conet::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
