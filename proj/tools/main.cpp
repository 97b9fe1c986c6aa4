#include "subcausal/cli.hpp"

int main(int argc, char** argv) { return subcausal::cli_main(argc, argv); }
