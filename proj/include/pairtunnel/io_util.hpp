#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

namespace pairtunnel {

/// Fixed 12-significant-digit formatting so regression diffs stay stable.
std::string format_double(double v);

/// FNV-1a 64-bit, hex string; used to stamp outputs with their config.
std::string fnv1a_hex(const std::string& data);

/// Deterministic CSV writer: '#' comment lines, one header row, then rows.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void comment(const std::string& text);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);

  static std::string cell(double v) { return format_double(v); }

 private:
  std::ofstream out_;
};

/// Deterministic parallel map: applies fn(i) for i in [0, n) on the given
/// number of threads; callers write results into slot i, so gathered output
/// order never depends on the thread count.
void parallel_for_indexed(int n, int threads, const std::function<void(int)>& fn);

}  // namespace pairtunnel
