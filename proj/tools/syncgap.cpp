#include "syncgap/cli.hpp"

int main(int argc, char** argv) { return syncgap::run_cli(argc, argv); }
