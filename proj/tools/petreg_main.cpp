#include "petreg/cli.hpp"

int main(int argc, char** argv) { return petreg::run_main(argc, argv); }
