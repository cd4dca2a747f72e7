#include "pacurves/cli.hpp"

int main(int argc, char** argv) { return pacurves::run_cli(argc, argv); }
