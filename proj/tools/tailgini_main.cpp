#include "tailgini/cli.hpp"

int main(int argc, char** argv) {
    return tailgini::run_cli(argc, argv);
}
