#include "bealab/cli.hpp"

int main(int argc, char** argv) { return bealab::cli::run_cli(argc, argv); }
