#include "jinet/cli.hpp"

int main(int argc, char** argv) { return jinet::cli_main(argc, argv); }
