#include "fracflow/cli.hpp"

int main(int argc, char** argv) { return fracflow::run_cli(argc, argv); }
