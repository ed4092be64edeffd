// Verification battery: one pass/fail line per criterion, exit 0 only when
// every line passes. Artifacts (CSV series) land in the working directory.
#include <cstdlib>
#include <iostream>
#include <string>

#include "weyl_lab/cli.hpp"

int main(int argc, char** argv) {
  std::string out_dir = argc > 1 ? argv[1] : ".";
  int threads = 1;
  if (const char* env = std::getenv("WEYL_LAB_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1 && v <= 64) threads = v;
  }
  auto suite = weyl_lab::cli::run_acceptance(out_dir, threads, std::cout);
  int passed = 0;
  for (const auto& line : suite.lines) passed += line.pass ? 1 : 0;
  std::cout << passed << "/" << suite.lines.size() << " criteria passed" << std::endl;
  return suite.all_pass() ? 0 : 1;
}
