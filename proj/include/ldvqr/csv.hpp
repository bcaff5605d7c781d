#pragma once

#include "ldvqr/core.hpp"

#include <iosfwd>

namespace ldvqr {

/// Comma-separated table with a header row. Cells are kept verbatim so the
/// file can be echoed back with extra columns appended; "NA" and the empty
/// string are missing values.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  Eigen::Index n_rows() const { return static_cast<Eigen::Index>(rows.size()); }
  bool has_column(const std::string& name) const;
  /// Parses a column as doubles; missing -> NaN, anything else -> data_error.
  VectorXd numeric_column(const std::string& name) const;
  void append_column(const std::string& name, const VectorXd& values,
                     const std::vector<Eigen::Index>& row_index);
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::string& path, const CsvTable& table);

}  // namespace ldvqr
