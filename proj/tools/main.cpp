#include "swta/cli.hpp"

int main(int argc, char** argv) { return swta::run_cli(argc, argv); }
