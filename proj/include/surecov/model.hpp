#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "surecov/sym_matrix.hpp"

namespace surecov {

/// sigma_ii = 1, sigma_ij = rho |i-j|^-(alpha+1).
struct PolyDecay {
  double rho = 0.0;
  double alpha = 1.0;
};

/// sigma_ij = rho^|i-j|.
struct ArDecay {
  double rho = 0.0;
};

/// sigma_ij = I(i=j) + offdiag * I(|i-j| <= k0-1). The diagonal therefore
/// carries 1 + offdiag unless `unit_diagonal` pins it to 1.
struct BandedUniform {
  Index k0 = 1;
  double offdiag = 0.0;
  bool unit_diagonal = false;
};

struct Explicit {
  SymMatrix matrix;
};

/// Parametric description of a true covariance matrix of dimension p.
struct CovModel {
  std::variant<PolyDecay, ArDecay, BandedUniform, Explicit> variant;
  Index p = 1;

  static CovModel poly_decay(Index p, double rho, double alpha) {
    return {PolyDecay{rho, alpha}, p};
  }
  static CovModel ar_decay(Index p, double rho) { return {ArDecay{rho}, p}; }
  static CovModel banded_uniform(Index p, Index k0, double offdiag, bool unit_diagonal = false) {
    return {BandedUniform{k0, offdiag, unit_diagonal}, p};
  }
  static CovModel explicit_matrix(SymMatrix m) {
    const Index p = m.dim();
    return {Explicit{std::move(m)}, p};
  }
};

/// Throws ParameterError when the model's parameter invariants fail.
void validate(const CovModel& model);

/// Short human-readable description, e.g. "poly_decay(rho=0.6,alpha=0.5)".
std::string describe(const CovModel& model);

SymMatrix build_sigma(const CovModel& model);

/// Exact bandwidth when the model has one: the smallest k with sigma_ij = 0
/// for all |i-j| >= k.
std::optional<Index> model_bandwidth(const CovModel& model);

/// Smallest k with m(i,j) == 0 for every |i-j| >= k.
Index detect_bandwidth(const SymMatrix& m);

/// n observations (rows) of a p-dimensional vector.
class Dataset {
 public:
  /// Throws SampleSizeError when rows.rows() < 3.
  explicit Dataset(Eigen::MatrixXd rows, std::uint64_t seed = 0);

  Index n() const noexcept { return rows_.rows(); }
  Index p() const noexcept { return rows_.cols(); }
  const Eigen::MatrixXd& rows() const noexcept { return rows_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  Eigen::MatrixXd rows_;
  std::uint64_t seed_;
};

/// Draws N(0, Sigma) samples through a lower Cholesky factor computed once.
class GaussianSampler {
 public:
  /// Factorizes sigma. One diagonal jitter of 1e-10 * trace / p is tried if
  /// the plain factorization fails; NotPositiveDefiniteError otherwise.
  explicit GaussianSampler(const SymMatrix& sigma);

  /// Deterministic in (sigma, n, seed).
  Dataset sample(Index n, std::uint64_t seed) const;

  Index dim() const noexcept { return lower_.rows(); }
  bool jittered() const noexcept { return jittered_; }
  const Eigen::MatrixXd& lower() const noexcept { return lower_; }

 private:
  Eigen::MatrixXd lower_;
  bool jittered_ = false;
};

Dataset sample_dataset(const SymMatrix& sigma, Index n, std::uint64_t seed);

}  // namespace surecov
