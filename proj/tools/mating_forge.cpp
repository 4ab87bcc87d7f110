#include "mating/cli.hpp"

int main(int argc, char** argv) { return mating::cli::run(argc, argv); }
