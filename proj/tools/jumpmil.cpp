#include "jumpmil/cli.hpp"

int main(int argc, char** argv) { return jumpmil::run_cli(argc, argv); }
