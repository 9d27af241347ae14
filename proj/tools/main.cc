// tools/main.cc
#include "cli.h"

int main(int argc, char** argv) { return tkws::cli::run(argc, argv); }
