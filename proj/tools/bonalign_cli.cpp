#include "bonalign/experiments/cli.hpp"

int main(int argc, char** argv) { return bonalign::experiments::cli_dispatch(argc, argv); }
