#include "qcsd/cli.hpp"

int main(int argc, char** argv) { return qcsd::run_cli(argc, argv); }
