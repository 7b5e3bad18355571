#include "packflow/cli.hpp"

int main(int argc, char** argv) {
    return packflow::run_cli({argv + 1, argv + argc});
}
