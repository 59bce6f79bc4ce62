#include "segfst/cli.h"

int main(int argc, char** argv) { return segfst::cli::Run(argc, argv); }
