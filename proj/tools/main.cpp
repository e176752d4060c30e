#include "magcomp/cli.hpp"

int main(int argc, char** argv) { return magcomp::cli::run(argc, argv); }
