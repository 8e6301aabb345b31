#include "mixlogit/cli.hpp"

int main(int argc, char** argv) { return mixlogit::run_cli(argc, argv); }
