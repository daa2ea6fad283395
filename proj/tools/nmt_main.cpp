#include "nmt/cli.hpp"

int main(int argc, char** argv) { return nmt::run_cli(argc, argv); }
