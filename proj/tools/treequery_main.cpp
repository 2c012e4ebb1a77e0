#include "treequery/cli.hpp"

int main(int argc, char** argv) { return treequery::run_cli(argc, argv); }
