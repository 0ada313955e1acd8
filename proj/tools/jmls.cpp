#include "jmls/cli.hpp"

int main(int argc, char** argv) { return jmls::cli::run(argc, argv); }
