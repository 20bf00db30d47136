#include "sockaudit/report/cli.hpp"

int main(int argc, char** argv) { return sockaudit::report::run_cli(argc, argv); }
