#include "fbgtpe/cli.hpp"

int main(int argc, char** argv) { return fbgtpe::cli::run(argc, argv); }
