#include "cvtomo/cli.hpp"

int main(int argc, char** argv) { return cvtomo::cli::run(argc, argv); }
