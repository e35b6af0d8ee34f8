#include "insider/cli.hpp"

int main(int argc, char** argv) { return insider::cli::run(argc, argv); }
