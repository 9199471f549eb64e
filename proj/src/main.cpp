#include "shufflelab/cli.hpp"

int main(int argc, char** argv) { return shufflelab::run_cli(argc, argv); }
