#include "snsm/commands.hpp"

int main(int argc, char** argv) { return snsm::run_cli(argc, argv); }
