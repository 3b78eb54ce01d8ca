#include "mlq/cli.hpp"

int main(int argc, char** argv) { return mlq::cli::run(argc, argv); }
