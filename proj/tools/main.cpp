#include "cli.hpp"

int main(int argc, char** argv) { return hawkes_ls::cli::run_cli(argc, argv); }
