#include "netscope_cli.hpp"

int main(int argc, char** argv) { return netscope::cli::run(argc, argv); }
