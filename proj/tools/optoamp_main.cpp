#include "optoamp/cli.hpp"

int main(int argc, char** argv) { return optoamp::cli::run(argc, argv); }
