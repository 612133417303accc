#include "ginv/cli.hpp"

int main(int argc, char** argv) { return ginv::cli_main(argc, argv); }
