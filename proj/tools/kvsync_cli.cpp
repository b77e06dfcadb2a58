#include "kvsync/cli.hpp"

int main(int argc, char** argv) { return kvsync::cli::run_cli(argc, argv); }
