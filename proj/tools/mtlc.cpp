#include "mtlloop/cli.hpp"

int main(int argc, char** argv) { return mtlloop::cli::main(argc, argv); }
