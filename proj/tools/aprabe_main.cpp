#include "aprabe/cli.hpp"

int main(int argc, char** argv) { return aprabe::cli::run_cli(argc, argv); }
