#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace diffrank {

/// One round of one algorithm.
struct TraceRow {
  std::string algo;
  std::size_t round = 0;
  std::uint64_t diffusions = 0;  // cumulative elementary steps / entry updates
  std::uint64_t scans = 0;       // cumulative nodes skipped by a scheduler
  std::optional<double> l1_error;
  std::optional<double> bound;
};

/// Per-round convergence records.
///
/// Rows of a single algorithm have strictly increasing round indices and
/// non-decreasing diffusion counts. A benchmark trace concatenates the rows of
/// several algorithms in the order they were requested.
struct ConvergenceTrace {
  static constexpr const char* kCsvHeader = "algo,round,diffusions,scans,l1_error,bound";

  std::vector<TraceRow> rows;

  void append(const ConvergenceTrace& other);
  std::vector<TraceRow> rows_for(const std::string& algo) const;

  /// Writes the CSV header and rows; reals use 9 significant digits and
  /// absent values are left empty.
  void write_csv(std::ostream& out) const;
};

}  // namespace diffrank
