#include "bkm/cli.hpp"

int main(int argc, char** argv) { return bkm::run_cli(argc, argv); }
