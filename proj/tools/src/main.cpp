#include "nftools/run.hpp"

int main(int argc, char** argv) { return nftools::main_cli(argc, argv); }
