#include "cli.hpp"

int main(int argc, char** argv) { return optiq::cli::run(argc, argv); }
