#include "nfarray/cli.hpp"

int main(int argc, char** argv) { return nfa::run_cli(argc, argv); }
