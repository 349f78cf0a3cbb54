#include "ncdirac/cli.hpp"

int main(int argc, char** argv) { return ncdirac::cli::run(argc, argv); }
