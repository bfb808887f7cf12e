#include "ssda/cli.hpp"

int main(int argc, char** argv) { return ssda::run_cli(argc, argv); }
