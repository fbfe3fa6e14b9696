#include "surecov/theory.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "surecov/criterion.hpp"
#include "surecov/error.hpp"
#include "surecov/numeric.hpp"

namespace surecov {

namespace {

void check_n(Index n) {
  if (n < 4) throw SampleSizeError("population formulas need n >= 4, got n = " + std::to_string(n));
}

// R_c contribution of one distance class carrying weight w.
// sq = sum sigma_ij^2, cross = sum sigma_ii sigma_jj over that class.
double risk_term(double n, double c, double w, double sq, double cross, int zone) {
  switch (zone) {
    case 0:  // weight 1
      return (c - 1.0) / n * sq + (n * c - n - 1.0) / (n * n) * cross;
    case 1:  // tapering shell
      return ((n - 1.0) / n * (w * w - (2.0 * n - c) / (n - 1.0) * w) + 1.0) * sq +
             (n - 1.0) / (n * n) * (w * w + n * (c - 2.0) / (n - 1.0) * w) * cross;
    default:  // weight 0
      return sq;
  }
}

// Toeplitz p x p matrix from a per-distance vector.
Eigen::MatrixXd toeplitz_matrix(const std::vector<double>& by_distance) {
  const Index p = static_cast<Index>(by_distance.size());
  Eigen::MatrixXd m(p, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < p; ++i) m(i, j) = by_distance[static_cast<std::size_t>(std::abs(i - j))];
  }
  return m;
}

struct CoefficientMatrices {
  Eigen::MatrixXd abar_big;  // A-bar_ij
  Eigen::MatrixXd bbar_big;  // B-bar_ij, exactly 0 where the weight is 0
};

CoefficientMatrices coefficient_matrices(Index p, Index n, const WeightScheme& scheme, Index tau,
                                         double c) {
  std::vector<double> a_by_d(static_cast<std::size_t>(p));
  std::vector<double> b_by_d(static_cast<std::size_t>(p));
  for (Index d = 0; d < p; ++d) {
    const double w = scheme.weight(tau, d);
    const CoeffSet k = coeffs(n, c, w);
    a_by_d[static_cast<std::size_t>(d)] = k.Abar;
    b_by_d[static_cast<std::size_t>(d)] = w == 0.0 ? 0.0 : k.Bbar;
  }
  return {toeplitz_matrix(a_by_d), toeplitz_matrix(b_by_d)};
}

struct VarCoefficients {
  double t1, t2, t3, t4;
};

VarCoefficients var_coefficients(Index n) {
  const double nd = static_cast<double>(n);
  const double n4 = nd * nd * nd * nd;
  return {2.0 * (nd - 2.0) / n4, 2.0 * (nd - 1.0) * (nd - 2.0) / n4,
          4.0 * (nd - 2.0) * (nd - 2.0) * (nd - 2.0) / n4, 8.0 * (nd - 2.0) * (nd - 2.0) / n4};
}

double var_n_exact(const Eigen::MatrixXd& s, const CoefficientMatrices& k, const VarCoefficients& f) {
  const Index p = s.rows();
  const auto& A = k.abar_big;
  const auto& B = k.bbar_big;
  std::vector<double> partial;
  partial.reserve(static_cast<std::size_t>(p * p));
  std::vector<double> inner(static_cast<std::size_t>(p * p));
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      std::size_t slot = 0;
      for (Index u = 0; u < p; ++u) {
        for (Index t = 0; t < p; ++t) {
          const double t1 = f.t1 * B(i, j) * B(u, t) *
                            (s(i, i) * s(u, u) * s(j, t) * s(j, t) +
                             s(i, i) * s(t, t) * s(j, u) * s(j, u) +
                             s(j, j) * s(u, u) * s(i, t) * s(i, t) +
                             s(j, j) * s(t, t) * s(i, u) * s(i, u));
          const double pair = s(i, u) * s(j, t) + s(i, t) * s(j, u);
          const double t2 = f.t2 * A(i, j) * A(u, t) * pair * pair;
          const double t3 = f.t3 * A(i, j) * A(u, t) * s(i, j) * s(u, t) * pair;
          const double t4 = f.t4 * A(i, j) * B(u, t) * s(i, j) *
                            (s(u, u) * s(i, t) * s(j, t) + s(t, t) * s(i, u) * s(j, u));
          inner[slot++] = t1 + t2 + t3 + t4;
        }
      }
      partial.push_back(pairwise_sum(inner));
    }
  }
  return pairwise_sum(partial);
}

// sum_{s,t} A_st sum_{i,j} A_ij v_i v_j with v_i = s_is s_it, cross factors
// restricted to |x - y| < band.
double shared_pair_contraction(const Eigen::MatrixXd& s, const Eigen::MatrixXd& A, Index band) {
  const Index p = s.rows();
  const Index reach = 2 * band - 2;
  std::vector<double> v;
  double total = 0.0;
  for (Index u = 0; u < p; ++u) {
    const Index t_lo = std::max<Index>(0, u - reach);
    const Index t_hi = std::min<Index>(p - 1, u + reach);
    double row = 0.0;
    for (Index t = t_lo; t <= t_hi; ++t) {
      const Index lo = std::max<Index>(0, std::max(u, t) - band + 1);
      const Index hi = std::min<Index>(p - 1, std::min(u, t) + band - 1);
      if (lo > hi) continue;
      v.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
      for (Index i = lo; i <= hi; ++i) v[static_cast<std::size_t>(i - lo)] = s(i, u) * s(i, t);
      double quad = 0.0;
      for (Index i = lo; i <= hi; ++i) {
        double acc = 0.0;
        for (Index j = lo; j <= hi; ++j) acc += A(i, j) * v[static_cast<std::size_t>(j - lo)];
        quad += v[static_cast<std::size_t>(i - lo)] * acc;
      }
      row += A(u, t) * quad;
    }
    total += row;
  }
  return total;
}

double var_n_factored(const Eigen::MatrixXd& s, const CoefficientMatrices& k,
                      const VarCoefficients& f, Index band) {
  const auto& A = k.abar_big;
  const auto& B = k.bbar_big;
  const Eigen::MatrixXd sq = s.cwiseProduct(s);
  const Eigen::MatrixXd g = A.cwiseProduct(s);
  const Eigen::VectorXd u = B * s.diagonal();

  const double t1 = 4.0 * u.dot(sq * u);
  const double t2 = 2.0 * A.cwiseProduct(sq * A * sq).sum() + 2.0 * shared_pair_contraction(s, A, band);
  const double t3 = 2.0 * g.cwiseProduct(s * g * s).sum();
  const double t4 = 2.0 * g.cwiseProduct(s * u.asDiagonal() * s).sum();
  return f.t1 * t1 + f.t2 * t2 + f.t3 * t3 + f.t4 * t4;
}

// Set partitions of {0..k-1} as block labels (restricted growth strings).
std::vector<std::vector<int>> set_partitions(int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> label(static_cast<std::size_t>(k), 0);
  const auto recurse = [&](auto&& self, int pos, int blocks) -> void {
    if (pos == k) {
      out.push_back(label);
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      label[static_cast<std::size_t>(pos)] = b;
      self(self, pos + 1, std::max(blocks, b + 1));
    }
  };
  recurse(recurse, 0, 0);
  return out;
}

// E[prod_f sigma_hat_{a_f b_f}] with sigma_hat = (1/n) sum_{r=1}^{n-1} z_r z_r^T.
class SampleMomentOracle {
 public:
  SampleMomentOracle(const SymMatrix& sigma, Index n)
      : sigma_(sigma), n_(static_cast<double>(n)), m_(static_cast<double>(n - 1)),
        partitions2_(set_partitions(2)), partitions4_(set_partitions(4)) {}

  double moment(std::span<const std::array<Index, 2>> factors) const {
    const auto& parts = factors.size() == 2 ? partitions2_ : partitions4_;
    double total = 0.0;
    for (const auto& label : parts) {
      const int blocks = *std::max_element(label.begin(), label.end()) + 1;
      double ways = 1.0;
      for (int b = 0; b < blocks; ++b) ways *= m_ - b;
      if (ways == 0.0) continue;
      double prod = 1.0;
      for (int b = 0; b < blocks && prod != 0.0; ++b) {
        std::array<Index, 8> idx{};
        std::size_t len = 0;
        for (std::size_t f = 0; f < factors.size(); ++f) {
          if (label[f] == b) {
            idx[len++] = factors[f][0];
            idx[len++] = factors[f][1];
          }
        }
        prod *= isserlis_moment(sigma_, std::span<const Index>(idx.data(), len));
      }
      total += ways * prod;
    }
    return total / std::pow(n_, static_cast<double>(factors.size()));
  }

 private:
  const SymMatrix& sigma_;
  double n_;
  double m_;
  std::vector<std::vector<int>> partitions2_;
  std::vector<std::vector<int>> partitions4_;
};

}  // namespace

CoeffSet coeffs(Index n, double c, double omega) {
  check_n(n);
  if (!(omega >= 0.0 && omega <= 1.0)) throw ParameterError("weight omega must lie in [0, 1]");
  const SureConstants k = sure_constants(n, c);
  const double nd = static_cast<double>(n);
  const double kappa = nd / (nd - 1.0);
  CoeffSet out;
  out.abar = (kappa - omega) * (kappa - omega);
  out.bbar = c * omega - kappa;
  out.Abar = out.abar + k.a_n * out.bbar;
  out.Bbar = out.abar + (k.a_n + k.b_n * (nd - 1.0)) * out.bbar;
  out.Cbar = out.abar + (k.a_n + k.b_n) * out.bbar;
  return out;
}

RiskProfile risk_profile(const SymMatrix& sigma, Index n, const WeightScheme& scheme, double c,
                         const std::vector<Index>& tau_grid) {
  check_n(n);
  sure_constants(n, c);
  if (tau_grid.empty()) throw ParameterError("tau grid is empty");
  const Index p = sigma.dim();
  const DistanceSums sums = distance_sums(sigma);
  const double nd = static_cast<double>(n);

  RiskProfile out;
  out.tau_grid = tau_grid;
  out.c = c;
  out.values.reserve(tau_grid.size());
  for (Index tau : tau_grid) {
    if (tau < 1) throw ParameterError("tau grid entries must be >= 1");
    const Index half = tau / 2;
    double value = 0.0;
    for (Index d = 0; d < p; ++d) {
      const auto k = static_cast<std::size_t>(d);
      const int zone = d <= half ? 0 : (d < tau ? 1 : 2);
      const double w = zone == 1 ? scheme.weight(tau, d) : (zone == 0 ? 1.0 : 0.0);
      value += risk_term(nd, c, w, sums.sq[k], sums.cross[k], zone);
    }
    out.values.push_back(value);
  }
  out.oracle_tau = select_tau(out.tau_grid, out.values);
  return out;
}

std::vector<double> frobenius_risk(const SymMatrix& sigma, Index n, const WeightScheme& scheme,
                                   const std::vector<Index>& tau_grid) {
  check_n(n);
  const Index p = sigma.dim();
  const DistanceSums sums = distance_sums(sigma);
  const double nd = static_cast<double>(n);
  const double shrink = (nd - 1.0) / nd;
  std::vector<double> out;
  out.reserve(tau_grid.size());
  for (Index tau : tau_grid) {
    double value = 0.0;
    for (Index d = 0; d < p; ++d) {
      const auto k = static_cast<std::size_t>(d);
      const double w = scheme.weight(tau, d);
      // E s~_ij = (n-1)/n s_ij, E s~_ij^2 = (n-1)/n s_ij^2 + (n-1)/n^2 s_ii s_jj.
      const double second = shrink * sums.sq[k] + shrink / nd * sums.cross[k];
      value += w * w * second - 2.0 * w * shrink * sums.sq[k] + sums.sq[k];
    }
    out.push_back(value);
  }
  return out;
}

Index oracle_tau(const RiskProfile& profile) {
  return select_tau(profile.tau_grid, profile.values);
}

std::string to_string(VarMethod method) {
  return method == VarMethod::exact ? "exact" : "banded-truncated";
}

VarApprox var_n(const SymMatrix& sigma, Index n, const WeightScheme& scheme, Index tau, double c,
                VarMethod method, std::optional<Index> truncation_band, Index exact_cap) {
  check_n(n);
  if (tau < 1) throw ParameterError("tau must be >= 1");
  const Index p = sigma.dim();
  const CoefficientMatrices k = coefficient_matrices(p, n, scheme, tau, c);
  const VarCoefficients f = var_coefficients(n);

  VarApprox out;
  out.tau = tau;
  out.method = method;
  if (method == VarMethod::exact) {
    if (p > exact_cap) {
      throw CapacityError("exact Var_n is limited to p <= " + std::to_string(exact_cap) +
                          " (p = " + std::to_string(p) + "); supply a truncation band");
    }
    out.value = var_n_exact(sigma.dense(), k, f);
  } else {
    if (!truncation_band) {
      throw ConfigError("banded-truncated Var_n requires a truncation band");
    }
    if (*truncation_band < 1) throw ParameterError("truncation band must be >= 1");
    out.truncation_band = truncation_band;
    out.value = var_n_factored(sigma.dense(), k, f, std::min(*truncation_band, p));
  }
  return out;
}

double isserlis_moment(const SymMatrix& sigma_small, std::span<const Index> indices) {
  if (indices.size() > 8) {
    throw CapacityError("isserlis_moment supports at most 8 indices");
  }
  if (indices.size() % 2 == 1) return 0.0;
  if (indices.empty()) return 1.0;
  for (Index i : indices) {
    if (i < 0 || i >= sigma_small.dim()) throw DimensionError("isserlis_moment: index out of range");
  }
  // Pair the first index with each remaining one and recurse on the rest.
  std::array<Index, 8> rest{};
  double total = 0.0;
  for (std::size_t partner = 1; partner < indices.size(); ++partner) {
    const double cov = sigma_small(indices[0], indices[partner]);
    if (cov == 0.0) continue;
    std::size_t len = 0;
    for (std::size_t k = 1; k < indices.size(); ++k) {
      if (k != partner) rest[len++] = indices[k];
    }
    total += cov * isserlis_moment(sigma_small, std::span<const Index>(rest.data(), len));
  }
  return total;
}

double exact_sure_variance(const SymMatrix& sigma_small, Index n, const WeightScheme& scheme,
                           Index tau, double c) {
  const Index p = sigma_small.dim();
  if (p > 3) throw CapacityError("exact_sure_variance is limited to p <= 3");
  if (n > 100) throw CapacityError("exact_sure_variance is limited to n <= 100");
  check_n(n);
  const SureConstants k = sure_constants(n, c);

  // SURE_c = sum_ij A_ij s_ij^2 + b_n bbar_ij s_ii s_jj as a list of
  // coefficient * s_ab * s_cd terms.
  struct Term {
    double coef;
    std::array<Index, 2> first;
    std::array<Index, 2> second;
  };
  std::vector<Term> terms;
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      const CoeffSet q = coeffs(n, c, scheme.weight(tau, std::abs(i - j)));
      terms.push_back({q.Abar, {i, j}, {i, j}});
      terms.push_back({k.b_n * q.bbar, {i, i}, {j, j}});
    }
  }

  const SampleMomentOracle oracle(sigma_small, n);
  double mean = 0.0;
  for (const Term& t : terms) {
    const std::array<std::array<Index, 2>, 2> f{t.first, t.second};
    mean += t.coef * oracle.moment(f);
  }
  double second = 0.0;
  for (const Term& a : terms) {
    for (const Term& b : terms) {
      const std::array<std::array<Index, 2>, 4> f{a.first, a.second, b.first, b.second};
      second += a.coef * b.coef * oracle.moment(f);
    }
  }
  return second - mean * mean;
}

}  // namespace surecov
