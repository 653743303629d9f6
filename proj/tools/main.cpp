#include "dygcl/cli.hpp"

int main(int argc, char** argv) { return dygcl::run_cli(argc, argv); }
