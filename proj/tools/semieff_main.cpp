#include "semieff/cli.hpp"

int main(int argc, char** argv) { return semieff::cli::run(argc, argv); }
