#include "qdcav/cli.hpp"

int main(int argc, char** argv) { return qdcav::cli_main(argc, argv); }
