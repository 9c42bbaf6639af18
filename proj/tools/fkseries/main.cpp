// Command-line front end for the knot series engine.
// Subcommands: compute, verify, list, export. See README for the grammar.
#include <iostream>

int main(int argc, char** argv) {
  (void)argc;
  (void)argv;
  std::cerr << "fkseries: command layer not wired up yet\n";
  return 2;
}
