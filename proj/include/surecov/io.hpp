#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "surecov/criterion.hpp"
#include "surecov/model.hpp"
#include "surecov/sym_matrix.hpp"

namespace surecov {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// Numeric CSV: one observation per row, comma delimited. A first row that
/// does not parse as numbers is taken as a header. Blank lines are skipped.
/// Throws ParseError naming the line (and column) on ragged rows or
/// non-numeric cells.
Eigen::MatrixXd read_csv_matrix(std::istream& in);
Eigen::MatrixXd read_csv_matrix_file(const std::string& path);

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

/// Columns `tau,sure_value`, one row per grid point.
void write_profile_csv(std::ostream& out, const CriterionProfile& profile);

/// Upper-triangle band entries `i,j,value` with |i - j| < tau, 1-based,
/// row-major.
void write_band_csv(std::ostream& out, const SymMatrix& m, Index tau);

}  // namespace surecov
