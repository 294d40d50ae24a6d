#include "fermion/cli.hpp"

int main(int argc, char** argv) { return fermion::cli::run(argc, argv); }
