#include "cvp/cli.h"

int main(int argc, char** argv) { return cvp::cli_main(argc, argv); }
