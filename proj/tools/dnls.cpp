#include "dnls/cli.hpp"

int main(int argc, char** argv) { return dnls::cli_main(argc, argv); }
