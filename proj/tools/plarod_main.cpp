#include "plarod/cli.hpp"

int main(int argc, char** argv) { return plarod::run_cli(argc, argv); }
