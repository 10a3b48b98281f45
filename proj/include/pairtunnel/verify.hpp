#pragma once

#include <string>
#include <vector>

namespace pairtunnel {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string details;
  double seconds = 0;
};

/// Runs the full physics acceptance suite (12 checks).  Each check is
/// self-contained and pins its tolerances in code.  threads parallelizes the
/// wave-packet scans inside individual checks, never across them, so output
/// is deterministic.
std::vector<CheckResult> run_acceptance_checks(int threads = 1);

/// Single check by 1-based id (for focused reruns).
CheckResult run_acceptance_check(int id, int threads = 1);

int acceptance_check_count();
std::string acceptance_check_name(int id);

}  // namespace pairtunnel
