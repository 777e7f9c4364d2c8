#include "grasspinch/cli.hpp"

int main(int argc, char** argv) { return grasspinch::run_cli(argc, argv); }
