#include "pkmech/cli.hpp"

int main(int argc, char** argv) { return pkmech::cli::run(argc, argv); }
