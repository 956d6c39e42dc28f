#include "homog/cli.hpp"

int main(int argc, char** argv) { return homog::cli::run_cli(argc, argv); }
