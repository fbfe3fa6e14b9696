#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surecov/estimate.hpp"
#include "surecov/sym_matrix.hpp"

namespace surecov {

/// Per-entry coefficients of the SURE_c decomposition for weight omega.
struct CoeffSet {
  double abar = 0.0;  // (n/(n-1) - w)^2
  double bbar = 0.0;  // c w - n/(n-1)
  double Abar = 0.0;  // abar + a_n bbar
  double Bbar = 0.0;  // abar + (a_n + b_n (n-1)) bbar
  double Cbar = 0.0;  // abar + (a_n + b_n) bbar
};

CoeffSet coeffs(Index n, double c, double omega);

/// Population criterion R_c(tau) = E[SURE_c(tau)] over a tau grid.
struct RiskProfile {
  std::vector<Index> tau_grid;
  std::vector<double> values;
  double c = 2.0;
  Index oracle_tau = 1;
};

/// Exact R_c(tau) for Toeplitz weights, summed per distance over three zones:
/// d <= floor(tau/2) (weight 1), floor(tau/2) < d < tau (weight w) and
/// d >= tau (weight 0). With c = 2 this is the Frobenius risk
/// E||Sigma_hat^(tau) - Sigma||_F^2.
RiskProfile risk_profile(const SymMatrix& sigma, Index n, const WeightScheme& scheme, double c,
                         const std::vector<Index>& tau_grid);

/// E||Sigma_hat^(tau) - Sigma||_F^2 computed from the first two moments of
/// the MLE entries, independently of the SURE algebra.
std::vector<double> frobenius_risk(const SymMatrix& sigma, Index n, const WeightScheme& scheme,
                                   const std::vector<Index>& tau_grid);

/// Smallest grid point attaining the minimum.
Index oracle_tau(const RiskProfile& profile);

enum class VarMethod { exact, banded_truncated };

std::string to_string(VarMethod method);

struct VarApprox {
  Index tau = 1;
  double value = 0.0;
  VarMethod method = VarMethod::exact;
  std::optional<Index> truncation_band;
};

inline constexpr Index kVarExactCap = 64;

/// Leading-order variance Var_n(tau) of SURE_c(tau) - R_c(tau).
///
/// `exact` evaluates the four-term quadruple sum over all (i, j, s, t) and is
/// limited to p <= exact_cap. `banded_truncated` reduces three of the terms
/// to O(p^3) matrix products and evaluates the remaining contraction
///   sum A_ij A_st s_is s_it s_js s_jt
/// with cross factors s_xy dropped for |x - y| >= truncation_band. The result
/// is exact whenever Sigma is banded within truncation_band.
VarApprox var_n(const SymMatrix& sigma, Index n, const WeightScheme& scheme, Index tau, double c,
                VarMethod method, std::optional<Index> truncation_band = std::nullopt,
                Index exact_cap = kVarExactCap);

/// E[x_{i1} ... x_{ik}] for x ~ N(0, sigma_small): the sum over all perfect
/// pairings of the product of covariances. Zero for odd k; k <= 8.
double isserlis_moment(const SymMatrix& sigma_small, std::span<const Index> indices);

/// Exact Var(SURE_c(tau)) for Gaussian data, by expanding SURE_c as a
/// quadratic form in the MLE entries and reducing every fourth moment over
/// replicate-index equality patterns with Isserlis inside each group.
/// Limited to p <= 3 and n <= 100.
double exact_sure_variance(const SymMatrix& sigma_small, Index n, const WeightScheme& scheme,
                           Index tau, double c);

}  // namespace surecov
