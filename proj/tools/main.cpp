#include "cli.hpp"

int main(int argc, char** argv) { return alselect::cli::run_cli(argc, argv); }
