#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

// Experiment runner behind the weyl-lab binary: parses a config, dispatches
// one experiment kind, writes CSV artifacts plus a summary.txt, and maps
// outcomes to exit codes. check-all runs the aggregate pass/fail suite that
// the acceptance test binary shares.
namespace weyl_lab::cli {

inline constexpr int kExitPass = 0;   // artifacts written, all checks pass
inline constexpr int kExitFail = 1;   // at least one check failed
inline constexpr int kExitUsage = 2;  // bad invocation or config

// one pass/fail line of a kind's summary or of the acceptance suite
struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CheckSuite {
  std::vector<CheckLine> lines;
  bool all_pass() const;
};

// the aggregate suite behind check-all: one line per criterion, streamed to
// log as it completes; artifacts land in out_dir
CheckSuite run_acceptance(const std::string& out_dir, int threads, std::ostream& log);

// full entry point: argv -> artifacts + exit code; diagnostics go to err
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace weyl_lab::cli
