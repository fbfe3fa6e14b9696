#pragma once

#include <optional>
#include <vector>

#include "surecov/estimate.hpp"
#include "surecov/sym_matrix.hpp"

namespace surecov {

/// Constants of the SURE_c formula for sample size n and penalty c.
struct SureConstants {
  Index n = 0;
  double c = 2.0;
  double a_n = 0.0;  // n(n-3) / ((n-1)(n-2)(n+1))
  double b_n = 0.0;  // n / ((n+1)(n-2))
};

/// Throws SampleSizeError for n < 3 and ParameterError for c < 2.
SureConstants sure_constants(Index n, double c);

/// Unbiased estimate of var(sigma_tilde^s_ij):
///   n/(n-1) * (a_n sigma_tilde_ij^2 + b_n sigma_tilde_ii sigma_tilde_jj).
double var_hat(const SymMatrix& sigma_tilde, const SureConstants& consts, Index i, Index j);

struct CriterionProfile {
  std::vector<Index> tau_grid;
  std::vector<double> values;
  double c = 2.0;
  Index selected_tau = 1;
};

/// SURE_c(tau) for every tau in the grid:
///
///   sum_ij (n/(n-1) - w_ij)^2 s_ij^2
///     + sum_ij (c w_ij - n/(n-1)) (a_n s_ij^2 + b_n s_ii s_jj)
///
/// with s = sigma_tilde (the MLE). Per-distance sums are formed once; banding
/// then costs O(1) per grid point and other schemes O(tau).
CriterionProfile sure_profile(const SymMatrix& sigma_tilde, const SureConstants& consts,
                              const WeightScheme& scheme, const std::vector<Index>& tau_grid);

/// Same quantity at a single tau, evaluated from scratch. Summation order
/// matches the profile sweep, so the two agree bit for bit.
double sure_value(const SymMatrix& sigma_tilde, const SureConstants& consts,
                  const WeightScheme& scheme, Index tau);

/// Three-term form ||Sigma_hat - Sigma_tilde^s||_F^2 - sum var_hat
/// + c (n-1)/n sum w var_hat, computed entry by entry. Reference for
/// sure_profile.
double sure_eq2_reference(const SymMatrix& sigma_tilde, const SureConstants& consts,
                          const WeightScheme& scheme, Index tau);

/// Smallest grid point attaining the minimum value.
Index select_tau(const std::vector<Index>& tau_grid, const std::vector<double>& values);
Index select_tau(const CriterionProfile& profile);

/// 1..min(p, n), or 1..min(p, cap) when a cap is given.
std::vector<Index> default_tau_grid(Index p, Index n, std::optional<Index> cap = std::nullopt);

}  // namespace surecov
