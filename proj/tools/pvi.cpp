#include "pvi/cli.hpp"

int main(int argc, char** argv) { return pvi::run_cli(argc, argv); }
