#include "refbench/cli.hpp"

int main(int argc, char** argv) {
    return refbench::run_main(argc, argv);
}
