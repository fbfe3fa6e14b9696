#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "surecov/error.hpp"

namespace surecov {

using Index = Eigen::Index;

/// Dense symmetric p x p matrix. Both triangles are stored and kept
/// bit-identical; the object is immutable once constructed.
class SymMatrix {
 public:
  SymMatrix() = default;

  /// Validates exact symmetry and a finite diagonal.
  explicit SymMatrix(Eigen::MatrixXd entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols()) {
      throw DimensionError("SymMatrix: matrix is " + std::to_string(m_.rows()) + "x" +
                           std::to_string(m_.cols()) + ", expected square");
    }
    for (Index j = 0; j < m_.cols(); ++j) {
      if (!std::isfinite(m_(j, j))) {
        throw ParameterError("SymMatrix: non-finite diagonal entry at " + std::to_string(j));
      }
      for (Index i = j + 1; i < m_.rows(); ++i) {
        if (m_(i, j) != m_(j, i)) {
          throw ParameterError("SymMatrix: entries (" + std::to_string(i) + "," +
                               std::to_string(j) + ") and its transpose differ");
        }
      }
    }
  }

  /// Mirrors the lower triangle onto the upper one, then validates.
  static SymMatrix from_lower(Eigen::MatrixXd entries) {
    for (Index j = 0; j < entries.cols(); ++j) {
      for (Index i = j + 1; i < entries.rows(); ++i) entries(j, i) = entries(i, j);
    }
    return SymMatrix(std::move(entries));
  }

  static SymMatrix identity(Index p) { return SymMatrix(Eigen::MatrixXd::Identity(p, p)); }
  static SymMatrix zero(Index p) { return SymMatrix(Eigen::MatrixXd::Zero(p, p)); }

  Index dim() const noexcept { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  const Eigen::MatrixXd& dense() const noexcept { return m_; }

  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  Eigen::MatrixXd m_;
};

}  // namespace surecov
