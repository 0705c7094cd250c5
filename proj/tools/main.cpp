#include "cli.hpp"

int main(int argc, char** argv) { return oqs::cli::run(argc, argv); }
