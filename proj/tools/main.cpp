#include "lazytensor/bench.hpp"

int main(int argc, char** argv) { return lazytensor::cli_main(argc, argv); }
