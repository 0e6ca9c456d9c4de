#pragma once

#include <odorsim/sim.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace odorsim::trace_io {

/// Column names of the CSV export, in order: t, then per agent i (1-based)
/// x, u, s (one column per component, suffixed _k when d > 1), V, eta,
/// mode, psi (agent reference, components), e (error norm); then the
/// common reference ref, max_gap, tracking_error, distance_to_source,
/// disturbance, leader.
std::vector<std::string> csv_header(int n_agents, int dim);

/// One row per record; numbers printed with 17 significant digits.
void write_csv(const sim::Trace& trace, std::ostream& out);

/// One JSON object per record.
void write_jsonl(const sim::Trace& trace, std::ostream& out);

/// Parsed CSV trace with string cells; numeric access on demand.
class TraceTable {
 public:
  static TraceTable read_csv(std::istream& in);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  bool has_column(const std::string& name) const;
  std::size_t column_index(const std::string& name) const;
  std::vector<double> numeric_column(const std::string& name) const;
  const std::string& cell(std::size_t row, std::size_t col) const { return rows_[row][col]; }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace odorsim::trace_io
