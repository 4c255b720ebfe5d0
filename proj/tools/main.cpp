#include "gmix_cli.hpp"

int main(int argc, char** argv) { return gmix::cli::run_cli(argc, argv); }
