#include "reservoir/cli.hpp"

int main(int argc, char** argv) { return reservoir::cli::run(argc, argv); }
