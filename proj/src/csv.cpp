#include "ldvqr/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ldvqr {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == ".";
}

}  // namespace

bool CsvTable::has_column(const std::string& name) const {
  for (const auto& h : header)
    if (h == name) return true;
  return false;
}

VectorXd CsvTable::numeric_column(const std::string& name) const {
  Eigen::Index col = -1;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == name) col = static_cast<Eigen::Index>(j);
  if (col < 0) throw data_error("unknown column name: " + name);

  VectorXd out(n_rows());
  for (Eigen::Index i = 0; i < n_rows(); ++i) {
    const std::string& cell = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)];
    if (is_missing(cell)) {
      out[i] = kNaN;
      continue;
    }
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(cell, &pos);
    } catch (const std::exception&) {
      throw data_error("non-numeric value '" + cell + "' in column " + name);
    }
    while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
    if (pos != cell.size())
      throw data_error("non-numeric value '" + cell + "' in column " + name);
    out[i] = v;
  }
  return out;
}

void CsvTable::append_column(const std::string& name, const VectorXd& values,
                             const std::vector<Eigen::Index>& row_index) {
  if (static_cast<std::size_t>(values.size()) != row_index.size())
    throw data_error("prediction column length mismatch");
  header.push_back(name);
  for (auto& row : rows) row.push_back("NA");
  char buf[64];
  for (std::size_t k = 0; k < row_index.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.10g", values[static_cast<Eigen::Index>(k)]);
    rows[static_cast<std::size_t>(row_index[k])].back() = buf;
  }
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw data_error("empty CSV input");
  table.header = split_line(line);
  if (table.header.size() == 1 && table.header[0].empty())
    throw data_error("CSV header row is empty");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != table.header.size()) {
      std::ostringstream msg;
      msg << "CSV row " << table.rows.size() + 2 << " has " << cells.size()
          << " cells, expected " << table.header.size();
      throw data_error(msg.str());
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open file: " + path);
  return read_csv(in);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t j = 0; j < table.header.size(); ++j)
    out << (j ? "," : "") << table.header[j];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write file: " + path);
  write_csv(out, table);
}

}  // namespace ldvqr
