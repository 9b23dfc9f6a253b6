#include "enki/cli/commands.hpp"

int main(int argc, char** argv) { return enki::cli::main_entry(argc, argv); }
