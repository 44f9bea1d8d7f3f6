#include "wavemap/cli.hpp"

int main(int argc, char** argv) { return wavemap::cli::run(argc, argv); }
