#include "kmreg/cli.hpp"

int main(int argc, char** argv) { return kmreg::cli::run(argc, argv); }
