#include "fracobs/cli.hpp"

int main(int argc, char** argv) { return fracobs::cli::run(argc, argv); }
