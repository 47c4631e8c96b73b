#include "dimcert/cli.hpp"

int main(int argc, char** argv) { return dimcert::run_cli(argc, argv); }
