#include "kerrcat/cli.hpp"

int main(int argc, char** argv) { return kerrcat::run_cli(argc, argv); }
