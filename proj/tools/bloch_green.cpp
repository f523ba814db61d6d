#include "bloch/cli.hpp"

int main(int argc, char** argv) { return bloch::cli::main_entry(argc, argv); }
