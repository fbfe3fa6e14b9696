#pragma once

#include <memory>
#include <string>
#include <vector>

#include "surecov/model.hpp"
#include "surecov/sym_matrix.hpp"

namespace surecov {

/// Toeplitz tapering weights omega_tau(d), d = |i - j|.
///
/// Every scheme satisfies, for each tau >= 1:
///   omega = 1 for d <= floor(tau/2), omega = 0 for d >= tau,
///   0 <= omega <= 1 in between.
class WeightScheme {
 public:
  enum class Kind { banding, czz_taper, custom };

  /// omega = I(d < tau).
  static WeightScheme banding();

  /// Linear taper (tau - d) / floor(tau/2) on floor(tau/2) < d < tau. Equal
  /// to banding for tau <= 3.
  static WeightScheme czz_taper();

  /// `table[tau - 1][d]` is omega_tau(d); entries past the end of a row are
  /// 0. Throws InvalidWeightError if any row breaks the weight conditions.
  static WeightScheme custom(std::vector<std::vector<double>> table);

  /// Throws ParameterError for tau < 1, d < 0, or tau outside a custom table.
  double weight(Index tau, Index d) const;

  Kind kind() const noexcept { return kind_; }
  std::string name() const;

  /// Largest tau a custom table covers; unbounded for built-in schemes.
  Index max_tau() const noexcept;

 private:
  explicit WeightScheme(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::shared_ptr<const std::vector<std::vector<double>>> table_;
};

/// Free-function form of WeightScheme::weight.
double weight(const WeightScheme& scheme, Index tau, Index d);

/// omega_tau(d) for d = 0..p-1.
std::vector<double> toeplitz_weights(const WeightScheme& scheme, Index tau, Index p);

/// Throws InvalidWeightError if `w` (indexed by distance) breaks the tapering
/// conditions for `tau`.
void check_weight_conditions(const std::vector<double>& w, Index tau);

/// Parses "banding" or "czz".
WeightScheme parse_scheme(const std::string& name);

struct TaperedEstimate {
  Index tau = 1;
  WeightScheme scheme = WeightScheme::banding();
  SymMatrix matrix;
};

/// Maximum-likelihood covariance (divisor n) of a dataset.
SymMatrix mle_cov(const Dataset& data);

/// n / (n - 1) times the MLE.
SymMatrix unbiased_cov(const SymMatrix& sigma_tilde, Index n);

TaperedEstimate taper(const SymMatrix& sigma_tilde, const WeightScheme& scheme, Index tau);

/// Squared Frobenius distance over all p^2 entries, pairwise summed.
double frob_sq_dist(const SymMatrix& a, const SymMatrix& b);

/// Per-distance sums of a symmetric matrix over ordered pairs (i, j) with
/// |i - j| = d (both triangles for d > 0):
///   sq[d]    = sum m_ij^2
///   cross[d] = sum m_ii m_jj
struct DistanceSums {
  std::vector<double> sq;
  std::vector<double> cross;
};

DistanceSums distance_sums(const SymMatrix& m);

}  // namespace surecov
