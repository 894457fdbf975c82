#include "actrack/harness.hpp"

int main(int argc, char** argv) { return actrack::cli_main(argc, argv); }
