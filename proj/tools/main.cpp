#include "spamnet/cli.hpp"

int main(int argc, char** argv) { return spamnet::run_cli(argc, argv); }
