#include "kitepath/cli.hpp"

int main(int argc, char** argv) { return kitepath::cli::run_cli(argc, argv); }
