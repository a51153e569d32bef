#include "symtwist/cli.hpp"

int main(int argc, char** argv) { return symtwist::run_cli(argc, argv); }
