#include "cfml/cli.hpp"

int main(int argc, char** argv) { return cfml::run_cli(argc, argv); }
