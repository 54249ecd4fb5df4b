#include "slowmate/cli.hpp"

int main(int argc, char** argv) { return slowmate::cli::dispatch(argc, argv); }
