#include "diffrank/trace.hpp"

#include <cstdio>

namespace diffrank {

namespace {

void write_real(std::ostream& out, const std::optional<double>& v) {
  if (!v) return;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", *v);
  out << buf;
}

}  // namespace

void ConvergenceTrace::append(const ConvergenceTrace& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

std::vector<TraceRow> ConvergenceTrace::rows_for(const std::string& algo) const {
  std::vector<TraceRow> out;
  for (const auto& r : rows) {
    if (r.algo == algo) out.push_back(r);
  }
  return out;
}

void ConvergenceTrace::write_csv(std::ostream& out) const {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.algo << ',' << r.round << ',' << r.diffusions << ',' << r.scans << ',';
    write_real(out, r.l1_error);
    out << ',';
    write_real(out, r.bound);
    out << '\n';
  }
}

}  // namespace diffrank
