#include "awd3/cli.hpp"

int main(int argc, char** argv) {
    return awd3::run_cli(argc, argv);
}
