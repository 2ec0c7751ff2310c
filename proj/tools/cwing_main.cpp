#include "cwing/cli_io.hpp"

int main(int argc, char** argv) { return cwing::run_cli(argc, argv); }
