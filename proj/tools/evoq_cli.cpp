#include "evoq/cli.hpp"

int main(int argc, char** argv) { return evoq::run_cli(argc, argv); }
