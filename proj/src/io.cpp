#include "surecov/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include "surecov/error.hpp"

namespace surecov {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_cell(std::string_view cell, double& value) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

Eigen::MatrixXd read_csv_matrix(std::istream& in) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool first_content = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    std::size_t bad_column = 0;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (!parse_cell(cells[k], row[k])) {
        numeric = false;
        bad_column = k + 1;
        break;
      }
    }
    if (first_content) {
      first_content = false;
      cols = cells.size();
      if (!numeric) continue;  // header row
    }
    if (cells.size() != cols) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                           " columns, found " + std::to_string(cells.size()),
                       line_no);
    }
    if (!numeric) {
      throw ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(bad_column) +
                           ": '" + std::string(cells[bad_column - 1]) + "' is not a number",
                       line_no, bad_column);
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  Eigen::MatrixXd m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = values[r * cols + c];
    }
  }
  return m;
}

Eigen::MatrixXd read_csv_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return read_csv_matrix(in);
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_profile_csv(std::ostream& out, const CriterionProfile& profile) {
  out << "tau,sure_value\n";
  for (std::size_t k = 0; k < profile.tau_grid.size(); ++k) {
    out << profile.tau_grid[k] << ',' << format_double(profile.values[k]) << '\n';
  }
}

void write_band_csv(std::ostream& out, const SymMatrix& m, Index tau) {
  const Index p = m.dim();
  for (Index i = 0; i < p; ++i) {
    for (Index j = i; j < p && j - i < tau; ++j) {
      out << (i + 1) << ',' << (j + 1) << ',' << format_double(m(i, j)) << '\n';
    }
  }
}

}  // namespace surecov
