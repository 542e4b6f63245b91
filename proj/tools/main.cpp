#include "nlwd/cli.hpp"

int main(int argc, char** argv) { return nlwd::cli_main(argc, argv); }
