#include "kolmo_cli/runner.hpp"

int main(int argc, char** argv) { return kolmo::cli::main_entry(argc, argv); }
