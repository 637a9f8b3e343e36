#include "cli.hpp"

int main(int argc, char** argv) { return gibbsic::cli_main(argc, argv); }
