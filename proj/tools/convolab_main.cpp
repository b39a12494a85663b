#include "convolab/cli.hpp"

int main(int argc, char** argv) { return convolab::run_cli(argc, argv); }
