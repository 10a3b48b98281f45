// Physics acceptance suite: every criterion prints one PASS/FAIL line.
// Exit code 0 iff all pass.  Also invoked through `pairtunnel verify`.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "pairtunnel/verify.hpp"

int main(int argc, char** argv) {
  int threads = 4;
  if (argc > 1) threads = std::max(1, std::atoi(argv[1]));

  const auto results = pairtunnel::run_acceptance_checks(threads);
  bool all_pass = true;
  double total = 0;
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    total += r.seconds;
    std::printf("%s  %2d. %s (%.2f s)\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.seconds);
    if (!r.details.empty()) std::printf("      %s\n", r.details.c_str());
  }
  std::printf("%s: %zu checks in %.1f s\n", all_pass ? "ALL PASS" : "FAILURES PRESENT",
              results.size(), total);
  return all_pass ? 0 : 1;
}
