#include "gubm/cli.hpp"

int main(int argc, char** argv) { return gubm::run_cli(argc, argv); }
