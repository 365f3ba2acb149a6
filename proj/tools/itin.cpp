#include "itin/cli.hpp"

int main(int argc, char** argv) { return itin::run_cli(argc, argv); }
