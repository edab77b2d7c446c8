#include "p2pmarket/cli.hpp"

int main(int argc, char** argv) { return p2pmarket::cli_main(argc, argv); }
