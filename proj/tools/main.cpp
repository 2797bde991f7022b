#include "commands.hpp"

int main(int argc, char** argv) { return remskit::cli::run_cli(argc, argv); }
