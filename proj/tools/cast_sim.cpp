#include "cast/cli.hpp"

#ifndef CAST_CONFIG_DIR
#define CAST_CONFIG_DIR ""
#endif

int main(int argc, char** argv) { return cast::run_cli(argc, argv, CAST_CONFIG_DIR); }
